//! Gaussian shift moments and the extended exponent p.
//!
//! All functions take the shift `s` of `Z + s`, `Z ~ N(0,1)`, and are even in `s`.

use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::num::quad::{integrate_gk, integrate_with_breaks, GAUSS_RADIUS};
use crate::num::{gamma, gauss_expect, normal_cdf, normal_pdf, normal_sf, Quadrature};

/// The exponent p on the extended real line. Serializes as a number, or as
/// the strings "inf" and "-inf".
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedP {
    NegInf,
    Finite(f64),
    PosInf,
}

/// The nine rows of the regime table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    NegInf,
    BelowNegOne,
    NegOne,
    NegOneToNegHalf,
    NegHalf,
    NegHalfToZero,
    Zero,
    ZeroToInf,
    PosInf,
}

impl ExtendedP {
    /// Inputs within this distance of −1, −1/2 or 0 are snapped onto the boundary row.
    pub const SNAP_EPS: f64 = 1e-12;

    /// Builds p, mapping ±∞ to the tags and snapping near-boundary values.
    ///
    /// # Panics
    /// On NaN.
    pub fn new(p: f64) -> Self {
        Self::snapped(p).0
    }

    /// As [`ExtendedP::new`], also reporting whether a snap happened.
    pub fn snapped(p: f64) -> (Self, bool) {
        assert!(!p.is_nan(), "p must not be NaN");
        if p == f64::INFINITY {
            return (ExtendedP::PosInf, false);
        }
        if p == f64::NEG_INFINITY {
            return (ExtendedP::NegInf, false);
        }
        for b in [-1.0, -0.5, 0.0] {
            if p != b && (p - b).abs() <= Self::SNAP_EPS {
                return (ExtendedP::Finite(b), true);
            }
        }
        (ExtendedP::Finite(p), false)
    }

    /// The numeric value, with ±∞ for the tags.
    pub fn value(&self) -> f64 {
        match *self {
            ExtendedP::NegInf => f64::NEG_INFINITY,
            ExtendedP::Finite(p) => p,
            ExtendedP::PosInf => f64::INFINITY,
        }
    }

    pub fn regime(&self) -> Regime {
        match *self {
            ExtendedP::NegInf => Regime::NegInf,
            ExtendedP::PosInf => Regime::PosInf,
            ExtendedP::Finite(p) => {
                if p < -1.0 {
                    Regime::BelowNegOne
                } else if p == -1.0 {
                    Regime::NegOne
                } else if p < -0.5 {
                    Regime::NegOneToNegHalf
                } else if p == -0.5 {
                    Regime::NegHalf
                } else if p < 0.0 {
                    Regime::NegHalfToZero
                } else if p == 0.0 {
                    Regime::Zero
                } else {
                    Regime::ZeroToInf
                }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.value() < 0.0
    }
}

impl From<f64> for ExtendedP {
    fn from(p: f64) -> Self {
        ExtendedP::new(p)
    }
}

impl FromStr for ExtendedP {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(ExtendedP::PosInf),
            "-inf" | "-infinity" => Ok(ExtendedP::NegInf),
            t => {
                let v: f64 = t.parse().map_err(|_| Error::domain(format!("cannot parse p from '{s}'")))?;
                if v.is_nan() {
                    return Err(Error::domain("p must not be NaN"));
                }
                Ok(ExtendedP::new(v))
            }
        }
    }
}

impl Serialize for ExtendedP {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedP::Finite(p) => ser.serialize_f64(*p),
            _ => ser.collect_str(self),
        }
    }
}

impl fmt::Display for ExtendedP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedP::NegInf => write!(f, "-inf"),
            ExtendedP::PosInf => write!(f, "inf"),
            ExtendedP::Finite(p) => write!(f, "{p}"),
        }
    }
}

fn moment_quad() -> Quadrature {
    Quadrature::precise().with_splits(&[0.0])
}

// Beyond this shift the window [s − 9, s + 9] misses the origin. Moments are then
// taken of y = s·ln(1 + Z/s) ≈ Z, which keeps relative accuracy for huge s.
const FAR: f64 = 2.0 * GAUSS_RADIUS;

fn far_expect<F: Fn(f64) -> f64>(f: F, s: f64) -> Result<f64> {
    gauss_expect(|z: f64| f(s * (z / s).ln_1p()), 0.0, &Quadrature::precise())
}

/// λ_p(0) = 2^{p/2} Γ((p+1)/2) / √π.
pub fn lambda_p0(p: f64) -> f64 {
    2f64.powf(p / 2.0) * gamma((p + 1.0) / 2.0) / std::f64::consts::PI.sqrt()
}

/// λ_p(s) = E|Z + s|^p, for p > −1.
pub fn lambda_p(p: f64, s: f64) -> Result<f64> {
    if !(p > -1.0) || !p.is_finite() {
        return Err(Error::domain(format!("λ_p needs p > -1, got {p}")));
    }
    if p == 0.0 {
        return Ok(1.0);
    }
    let s = s.abs();
    if p == 2.0 {
        return Ok(1.0 + s * s);
    }
    if s > FAR {
        return Ok(s.powf(p) * far_expect(|y| (p * y / s).exp(), s)?);
    }
    gauss_expect(|x: f64| x.abs().powf(p), s, &moment_quad())
}

/// λ_{p,m}(s) = E||Z + s|^p − λ_p(s)|^m, for m > 0 and p > −1/m.
pub fn lambda_pm(p: f64, m: f64, s: f64) -> Result<f64> {
    if !(m > 0.0) || !(p > -1.0 / m) {
        return Err(Error::domain(format!("λ_(p,m) needs m > 0 and p > -1/m, got p={p}, m={m}")));
    }
    let s = s.abs();
    if s > FAR && p != 0.0 {
        // |Z+s|^p = s^p (1 + w/s) with w = s·expm1(p y/s)
        let w = |y: f64| s * (p * y / s).exp_m1();
        let mean = far_expect(w, s)?;
        return Ok(s.powf((p - 1.0) * m) * far_expect(|y| (w(y) - mean).abs().powf(m), s)?);
    }
    let lam = lambda_p(p, s)?;
    if m == 2.0 {
        return Ok((lambda_p(2.0 * p, s)? - lam * lam).max(0.0));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let r = lam.powf(1.0 / p);
    let q = moment_quad().with_splits(&[-r, r]);
    gauss_expect(|x: f64| (x.abs().powf(p) - lam).abs().powf(m), s.abs(), &q)
}

/// λ̃(s) = E ln|Z+s| for m = 1, and the central moments E|ln|Z+s| − λ̃(s)|^m for m = 2, 3.
pub fn log_moment(m: u32, s: f64) -> Result<f64> {
    let s = s.abs();
    if s > FAR {
        // ln|Z+s| = ln s + ln(1 + Z/s)
        let mean = far_expect(|y| y, s)?;
        return match m {
            1 => Ok(s.ln() + mean / s),
            2 | 3 => Ok(far_expect(|y| (y - mean).abs().powi(m as i32), s)? / s.powi(m as i32)),
            _ => Err(Error::domain(format!("log_moment supports m in {{1,2,3}}, got {m}"))),
        };
    }
    let q = moment_quad();
    let mean = gauss_expect(|x: f64| x.abs().ln(), s, &q)?;
    match m {
        1 => Ok(mean),
        2 => {
            let sq = gauss_expect(|x: f64| x.abs().ln().powi(2), s, &q)?;
            Ok((sq - mean * mean).max(0.0))
        }
        3 => {
            let r = mean.exp();
            let q3 = q.with_splits(&[-r, r]);
            gauss_expect(|x: f64| (x.abs().ln() - mean).abs().powi(3), s, &q3)
        }
        _ => Err(Error::domain(format!("log_moment supports m in {{1,2,3}}, got {m}"))),
    }
}

/// μ̃_d(s) = E(|Z+s|^{−1} ∧ d).
pub fn mu_tilde(d: usize, s: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::domain("μ̃_d needs d ≥ 1"));
    }
    let s = s.abs();
    if s > FAR {
        // |Z+s| ≥ s − 9 > 1/d on the window, so the cap is inactive
        return Ok(far_expect(|y| (-y / s).exp(), s)? / s);
    }
    let df = d as f64;
    let eps = 1.0 / df;
    // inner branch: d·P(|Z+s| ≤ 1/d)
    let inner = integrate_gk(|x: f64| normal_pdf(x - s), -eps, eps, 1e-16, 1e-14, 50)?.value * df;
    // outer branches in v = ln|x|: ∫_{1/d}^∞ φ(x ∓ s)/x dx = ∫ φ(e^v ∓ s) dv
    let lo = -df.ln();
    let hi = (s + GAUSS_RADIUS + 1.0).ln();
    let q = Quadrature::precise();
    let mut breaks = Vec::new();
    if s > eps {
        breaks.push(s.ln());
    }
    let right = integrate_with_breaks(|v: f64| normal_pdf(v.exp() - s), lo, hi, &q, &breaks)?.value;
    let left = integrate_with_breaks(|v: f64| normal_pdf(v.exp() + s), lo, hi, &q, &[])?.value;
    Ok(inner + right + left)
}

/// c_{d,α} = √(2 ln(−d / (√(π ln d) ln(1−α)))).
pub fn c_crit_inf(d: usize, alpha: f64) -> Result<f64> {
    if d < 2 || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("c_(d,α) needs d ≥ 2 and α in (0,1), got d={d}, α={alpha}")));
    }
    let df = d as f64;
    let arg = -df / ((std::f64::consts::PI * df.ln()).sqrt() * (-alpha).ln_1p());
    if !(arg > 1.0) {
        return Err(Error::domain(format!("c_(d,α): inner argument {arg} ≤ 1 for d={d}, α={alpha}")));
    }
    Ok((2.0 * arg.ln()).sqrt())
}

/// ln Φ(x), accurate far into the lower tail.
pub(crate) fn ln_normal_cdf(x: f64) -> f64 {
    if x > -30.0 {
        return normal_cdf(x).ln();
    }
    let x2 = x * x;
    -0.5 * x2 - (-x).ln() - 0.5 * (2.0 * std::f64::consts::PI).ln() + (1.0 - 1.0 / x2 + 3.0 / (x2 * x2)).ln()
}

/// −ln P(|Z+s| ≤ c) for a given threshold c.
pub(crate) fn neg_ln_inside(c: f64, s: f64) -> f64 {
    let s = s.abs();
    if s <= c {
        let out = normal_sf(c - s) + normal_sf(c + s);
        -(-out).ln_1p()
    } else {
        let lo = normal_cdf(-c - s);
        let hi = normal_cdf(c - s);
        let p = hi - lo;
        if p > 1e-300 {
            -p.ln()
        } else {
            // lo is negligible next to hi this far out
            -ln_normal_cdf(c - s)
        }
    }
}

/// λ_{∞;d,α}(s) = −ln P(|Z+s| ≤ c_{d,α}).
pub fn lambda_inf(d: usize, alpha: f64, s: f64) -> Result<f64> {
    Ok(neg_ln_inside(c_crit_inf(d, alpha)?, s))
}
