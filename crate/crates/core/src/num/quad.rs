//! Adaptive quadrature and Gaussian expectations.
//!
//! Smooth pieces use globally adaptive 7/15-point Gauss–Kronrod. Pieces that
//! touch a declared singular point use a tanh-sinh rule, which absorbs
//! integrable endpoint singularities such as |x|^p (p > −1) and ln|x|.

use super::normal::normal_pdf;
use crate::error::{Error, Result};
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Half-width of the truncated Gaussian domain; tail mass beyond it is below 1e−18.
pub const GAUSS_RADIUS: f64 = 9.0;

/// Quadrature settings shared by every integral in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Points where the integrand is singular or has a kink; the domain is split there.
    pub splits: Vec<f64>,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { abs_tol: 1e-10, rel_tol: 1e-10, max_subdivisions: 200, splits: Vec::new() }
    }
}

impl Quadrature {
    /// Tolerances tight enough for the closed-form oracles (1e−13).
    pub fn precise() -> Self {
        Quadrature { abs_tol: 1e-13, rel_tol: 1e-13, max_subdivisions: 400, splits: Vec::new() }
    }

    pub fn with_splits(mut self, splits: &[f64]) -> Self {
        self.splits.extend_from_slice(splits);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::Config("tolerances must be positive and max_subdivisions ≥ 1".into()));
        }
        Ok(())
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod on a finite interval.
pub fn integrate_gk<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_sub: usize) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    let mut count = 1;
    loop {
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Estimate { value: total, error: err });
        }
        if count >= max_sub {
            return Err(Error::Accuracy { estimate: total, bound: err });
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision; accept what we have
            heap.push(worst);
            return Ok(Estimate { value: total, error: err });
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        err = heap.iter().map(|p| p.error).sum();
        count += 1;
    }
}

/// Tanh-sinh rule on [a, b]; tolerant of integrable singularities at either end.
///
/// Nodes are placed by their distance to the nearer endpoint so a singular
/// point at an endpoint is never rounded onto.
pub fn integrate_tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    const T_MAX: f64 = 6.0;
    const MAX_LEVEL: usize = 12;
    let len = b - a;
    let half_pi = std::f64::consts::FRAC_PI_2;
    // contribution of the symmetric node pair at abscissa t ≥ 0
    let pair = |t: f64| -> f64 {
        let u = half_pi * t.sinh();
        let e = (-2.0 * u).exp();
        let delta = len * e / (1.0 + e);
        let ch = (u).cosh();
        let w = 0.5 * len * half_pi * t.cosh() / (ch * ch);
        if w == 0.0 || delta == 0.0 {
            return 0.0;
        }
        let mut s = 0.0;
        for x in [a + delta, b - delta] {
            let v = f(x);
            if v.is_finite() {
                s += w * v;
            } else if t < 3.0 {
                return f64::NAN;
            }
        }
        s
    };
    let mut h = 1.0;
    let center = f(0.5 * (a + b)) * 0.5 * len * half_pi;
    let mut sum = center;
    let mut t = h;
    while t <= T_MAX {
        sum += pair(t);
        t += h;
    }
    let mut prev = sum * h;
    for _ in 1..MAX_LEVEL {
        h *= 0.5;
        let mut t = h;
        while t <= T_MAX {
            sum += pair(t);
            t += 2.0 * h;
        }
        let cur = sum * h;
        if !cur.is_finite() {
            return Err(Error::Accuracy { estimate: cur, bound: f64::INFINITY });
        }
        let diff = (cur - prev).abs();
        if diff <= abs_tol.max(rel_tol * cur.abs()) {
            return Ok(Estimate { value: cur, error: diff });
        }
        prev = cur;
    }
    Err(Error::Accuracy { estimate: prev, bound: f64::NAN })
}

/// ∫_a^b f with the configured splits: GK on smooth pieces, tanh-sinh on
/// pieces (at most unit length) adjacent to a split point.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, quad: &Quadrature) -> Result<Estimate> {
    integrate_with_breaks(f, a, b, quad, &[])
}

/// As [`integrate`], with extra plain breakpoints where the integrand is smooth
/// but benefits from a knot (for example the centre of a Gaussian bump).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    quad: &Quadrature,
    plain: &[f64],
) -> Result<Estimate> {
    quad.validate()?;
    let is_split = |x: f64| quad.splits.contains(&x);
    let mut bounds: Vec<f64> = quad.splits.iter().chain(plain).copied().filter(|&x| x > a && x < b).collect();
    bounds.push(a);
    bounds.push(b);
    bounds.sort_by(f64::total_cmp);
    bounds.dedup();
    let mut knots = vec![a];
    for w in bounds.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if is_split(lo) && hi - lo > 2.0 {
            knots.push(lo + 1.0);
        }
        if is_split(hi) && hi - lo > 2.0 {
            knots.push(hi - 1.0);
        }
        knots.push(hi);
    }
    let abs_tol = quad.abs_tol / (knots.len() - 1) as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let est = if is_split(lo) || is_split(hi) {
            singular_piece(&f, lo, hi, is_split(lo), is_split(hi), abs_tol, quad, 0)?
        } else {
            integrate_gk(&f, lo, hi, abs_tol, quad.rel_tol, quad.max_subdivisions)?
        };
        value += est.value;
        error += est.error;
    }
    Ok(Estimate { value, error })
}

// Tanh-sinh on a piece with singular end(s); on failure the piece is halved,
// the half away from the singularity goes to GK and the other half recurses.
#[allow(clippy::too_many_arguments)]
fn singular_piece<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    lo_s: bool,
    hi_s: bool,
    abs_tol: f64,
    quad: &Quadrature,
    depth: usize,
) -> Result<Estimate> {
    match integrate_tanh_sinh(f, lo, hi, abs_tol, quad.rel_tol) {
        Ok(e) => Ok(e),
        Err(err) if depth >= 40 => Err(err),
        Err(_) => {
            let mid = 0.5 * (lo + hi);
            let tol = 0.5 * abs_tol;
            let (a, b) = match (lo_s, hi_s) {
                (true, true) => (
                    singular_piece(f, lo, mid, true, false, tol, quad, depth + 1)?,
                    singular_piece(f, mid, hi, false, true, tol, quad, depth + 1)?,
                ),
                (true, false) => (
                    singular_piece(f, lo, mid, true, false, tol, quad, depth + 1)?,
                    integrate_gk(f, mid, hi, tol, quad.rel_tol, quad.max_subdivisions)?,
                ),
                _ => (
                    integrate_gk(f, lo, mid, tol, quad.rel_tol, quad.max_subdivisions)?,
                    singular_piece(f, mid, hi, false, true, tol, quad, depth + 1)?,
                ),
            };
            Ok(Estimate { value: a.value + b.value, error: a.error + b.error })
        }
    }
}

/// E f(Z + s) for Z ~ N(0,1), integrated over [s − 9, s + 9].
pub fn gauss_expect<F: Fn(f64) -> f64>(f: F, s: f64, quad: &Quadrature) -> Result<f64> {
    gauss_expect_est(f, s, quad).map(|e| e.value)
}

pub fn gauss_expect_est<F: Fn(f64) -> f64>(f: F, s: f64, quad: &Quadrature) -> Result<Estimate> {
    let g = |x: f64| {
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v * normal_pdf(x - s)
        }
    };
    integrate_with_breaks(g, s - GAUSS_RADIUS, s + GAUSS_RADIUS, quad, &[s])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_weights_sum_and_exactness() {
        let s: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((g - 2.0).abs() < 1e-15);
        // K15 integrates degree 22 exactly
        let (v, _) = gk15(&|x: f64| x.powi(22), -1.0, 1.0);
        assert!((v - 2.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_moments() {
        let q = Quadrature::default();
        assert!((gauss_expect(|x| x * x, 0.0, &q).unwrap() - 1.0).abs() < 1e-12);
        assert!((gauss_expect(|x| x * x, 1.0, &q).unwrap() - 2.0).abs() < 1e-12);
        let q0 = Quadrature::default().with_splits(&[0.0]);
        let abs = gauss_expect(f64::abs, 0.0, &q0).unwrap();
        assert!((abs - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn singular_power() {
        // ∫_0^1 x^{-0.9} dx = 10
        let q = Quadrature::precise().with_splits(&[0.0]);
        let v = integrate(|x: f64| x.abs().powf(-0.9), 0.0, 1.0, &q).unwrap();
        assert!((v.value - 10.0).abs() < 1e-11, "{}", v.value);
        // ∫_{-1}^{1} ln|x| dx = -2
        let v = integrate(|x: f64| x.abs().ln(), -1.0, 1.0, &q).unwrap();
        assert!((v.value + 2.0).abs() < 1e-12);
    }

    #[test]
    fn reflection_symmetry() {
        // E f(Z+s) = E f(−(Z−s)) for a family of f
        let q = Quadrature::default().with_splits(&[0.0]);
        let fams: [fn(f64, f64) -> f64; 4] = [
            |x, a| (a * x).sin() + x * x,
            |x, a| (x - a).abs().sqrt(),
            |x, a| (-(x - a).powi(2)).exp(),
            |x, a| x.abs().powf(a.abs() + 0.5),
        ];
        for k in 0..20 {
            let a = 0.37 * k as f64 - 3.0;
            let s = 0.21 * k as f64 - 2.0;
            let f = fams[k % 4];
            let lhs = gauss_expect(|x| f(x, a), s, &q).unwrap();
            let rhs = gauss_expect(|x| f(-x, a), -s, &q).unwrap();
            assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()), "k={k}");
        }
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let err = integrate_gk(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, 1e-15, 1e-15, 3).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }

    #[test]
    fn density_integrates_to_one() {
        let v = integrate_gk(normal_pdf, -9.0, 9.0, 1e-14, 1e-14, 100).unwrap();
        assert!((v.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bad_config() {
        let q = Quadrature { abs_tol: 0.0, ..Quadrature::default() };
        assert!(integrate(|x| x, 0.0, 1.0, &q).is_err());
    }
}
