//! Monte Carlo checks of the asymptotic claims.
//!
//! Replications are split into fixed chunks of [`CHUNK`] reps; chunk k draws
//! from stream `(base_stream << 32) + k` of the caller's seed. Chunks run on
//! the rayon pool and are merged in chunk order, so every result depends on
//! (seed, stream, reps) only and never on the thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{ExtendedP, Regime};
use crate::num::{normal_cdf, normal_sf, RngStream};
use crate::ptest::{pmean, Kernel};
use crate::regime::null_row;

/// Minimum replications accepted by the estimators.
pub const MIN_REPS: usize = 1000;
/// Replications per random stream.
pub const CHUNK: usize = 500;

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCResult {
    pub estimate: f64,
    /// Half-width of the 95% confidence interval.
    pub half_width: f64,
    pub reps: usize,
    pub seed: u64,
}

fn check_reps(reps: usize) -> Result<()> {
    if reps < MIN_REPS {
        return Err(Error::Config(format!("Monte Carlo needs at least {MIN_REPS} replications, got {reps}")));
    }
    Ok(())
}

/// Runs `job(rng, count)` once per chunk, in parallel, returning the results in chunk order.
fn run_chunks<T, F>(reps: usize, rng: &RngStream, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RngStream, usize) -> T + Sync,
{
    let n_chunks = reps.div_ceil(CHUNK);
    let base = rng.stream() << 32;
    (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let mut r = rng.substream(base + k as u64);
            let count = CHUNK.min(reps - k * CHUNK);
            job(&mut r, count)
        })
        .collect()
}

fn proportion(hits: u64, reps: usize, seed: u64) -> MCResult {
    let ph = hits as f64 / reps as f64;
    MCResult { estimate: ph, half_width: Z95 * (ph * (1.0 - ph) / reps as f64).sqrt(), reps, seed }
}

fn check_shift(d: usize, shift: &[f64]) -> Result<()> {
    if d == 0 {
        return Err(Error::domain("dimension must be ≥ 1"));
    }
    if !shift.is_empty() && shift.len() != d {
        return Err(Error::domain(format!("shift has dimension {}, expected {d}", shift.len())));
    }
    Ok(())
}

/// Estimates P(⟨Z + s⟩_p > c); an empty `shift` means s = 0.
pub fn empirical_power(p: ExtendedP, d: usize, shift: &[f64], c: f64, reps: usize, rng: &RngStream) -> Result<MCResult> {
    check_reps(reps)?;
    check_shift(d, shift)?;
    let k = Kernel::new(p);
    let thr = k.threshold(c);
    let hits: u64 = run_chunks(reps, rng, |r, count| {
        let mut z = vec![0.0; d];
        let mut h = 0u64;
        for _ in 0..count {
            r.fill_normal(&mut z);
            h += k.rejects(k.reduce(&z, shift), thr) as u64;
        }
        h
    })
    .into_iter()
    .sum();
    Ok(proportion(hits, reps, rng.seed()))
}

/// Draws `reps` values of ⟨Z + s⟩_p.
pub fn sample_statistic(p: ExtendedP, d: usize, shift: &[f64], reps: usize, rng: &RngStream) -> Result<Vec<f64>> {
    check_shift(d, shift)?;
    let k = Kernel::new(p);
    Ok(run_chunks(reps, rng, |r, count| {
        let mut z = vec![0.0; d];
        (0..count)
            .map(|_| {
                r.fill_normal(&mut z);
                k.to_pmean(k.reduce(&z, shift))
            })
            .collect::<Vec<f64>>()
    })
    .concat())
}

/// Empirical (1−α)-quantile of ⟨Z⟩_p with a distribution-free 95% interval
/// from the binomial order-statistic ranks.
pub fn empirical_critval(p: ExtendedP, d: usize, alpha: f64, reps: usize, rng: &RngStream) -> Result<MCResult> {
    check_reps(reps)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("α must lie in (0,1), got {alpha}")));
    }
    let mut stats = sample_statistic(p, d, &[], reps, rng)?;
    stats.sort_by(f64::total_cmp);
    let m = reps as f64;
    let rank = |q: f64| -> usize { ((q * m).ceil() as usize).clamp(1, reps) - 1 };
    let centre = rank(1.0 - alpha);
    let spread = Z95 * (m * alpha * (1.0 - alpha)).sqrt();
    let lo = stats[rank((m * (1.0 - alpha) - spread).max(1.0) / m)];
    let hi = stats[rank((m * (1.0 - alpha) + spread).min(m) / m)];
    Ok(MCResult { estimate: stats[centre], half_width: 0.5 * (hi - lo), reps, seed: rng.seed() })
}

/// sup_x |F_n(x) − F(x)|.
pub fn ks_distance(samples: &[f64], mut cdf: impl FnMut(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("KS distance needs at least one sample"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs.iter().enumerate().fold(0.0, |acc: f64, (i, &x)| {
        let f = cdf(x);
        acc.max(((i + 1) as f64 / n - f).abs()).max((f - i as f64 / n).abs())
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsReport {
    pub ks: f64,
    pub reps: usize,
    /// Name of the limit law the normalized statistic was compared with.
    pub law: String,
}

/// Draws the null statistic at dimension d, normalizes it as in the limit
/// theorem of its row and returns the KS distance to the limit law. The rows
/// p = ±∞ compare min/max |Z_j| with their exact distribution functions.
pub fn ks_null_limit(p: ExtendedP, d: usize, reps: usize, rng: &RngStream) -> Result<KsReport> {
    check_reps(reps)?;
    let row = null_row(p, 0.5, d)?;
    let df = d as f64;
    let k = Kernel::new(p);
    let reduced: Vec<f64> = run_chunks(reps, rng, |r, count| {
        let mut z = vec![0.0; d];
        (0..count)
            .map(|_| {
                r.fill_normal(&mut z);
                k.reduce(&z, &[])
            })
            .collect::<Vec<f64>>()
    })
    .concat();
    let (base, spread) = (row.base(), row.spread());
    let stable = |shift: f64, scale: f64| -> Result<(f64, String)> {
        let law = *row.law().expect("stable row");
        let t: Vec<f64> = reduced.iter().map(|r| scale * (r - shift)).collect();
        let mut err = None;
        let ks = ks_distance(&t, |x| {
            law.cdf(x).unwrap_or_else(|e| {
                err.get_or_insert(e);
                f64::NAN
            })
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok((ks, format!("stable(p={}, b={})", law.p, law.b))),
        }
    };
    let (ks, law) = match row.regime {
        Regime::NegInf => (
            ks_distance(&reduced, |x| -(df * (2.0 * normal_sf(x)).ln()).exp_m1())?,
            "exact min|Z_j| law".to_string(),
        ),
        Regime::PosInf => (
            ks_distance(&reduced, |x| (df * (-2.0 * normal_sf(x)).ln_1p()).exp())?,
            "exact max|Z_j| law".to_string(),
        ),
        Regime::BelowNegOne => stable(0.0, df.powf(p.value() + 1.0))?,
        Regime::NegOne => stable(base, 1.0)?,
        Regime::NegOneToNegHalf => stable(base, df.powf(p.value() + 1.0))?,
        Regime::NegHalf => {
            let scale = df / (spread * row.kappa);
            let t: Vec<f64> = reduced.iter().map(|r| scale * (r - base)).collect();
            (ks_distance(&t, normal_cdf)?, "normal".to_string())
        }
        Regime::NegHalfToZero | Regime::Zero | Regime::ZeroToInf => {
            let scale = df.sqrt() / spread;
            let t: Vec<f64> = reduced.iter().map(|r| scale * (r - base)).collect();
            (ks_distance(&t, normal_cdf)?, "normal".to_string())
        }
    };
    Ok(KsReport { ks, reps, law })
}

/// Does the vector of squares `big` majorize `small` (equal sums, dominating sorted prefix sums)?
pub fn majorizes_squares(big: &[f64], small: &[f64]) -> bool {
    if big.len() != small.len() || big.is_empty() {
        return false;
    }
    let sorted_sq = |v: &[f64]| {
        let mut s: Vec<f64> = v.iter().map(|x| x * x).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let (a, b) = (sorted_sq(big), sorted_sq(small));
    let total: f64 = a.iter().sum();
    let tol = 1e-12 * total.max(1.0);
    if (total - b.iter().sum::<f64>()).abs() > tol {
        return false;
    }
    let (mut pa, mut pb) = (0.0, 0.0);
    a.iter().zip(&b).all(|(x, y)| {
        pa += x;
        pb += y;
        pa >= pb - tol
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Schur2Outcome {
    /// P at w significantly above P at v, as expected for p ≤ 2.
    ConsistentConcave,
    /// P at v significantly above P at w, as expected for p ≥ 2.
    ConsistentConvex,
    /// The difference is within 3 standard errors.
    Inconclusive,
    /// A significant difference in the direction the regime forbids.
    Violation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schur2Report {
    pub outcome: Schur2Outcome,
    pub power_v: f64,
    pub power_w: f64,
    /// Mean of the paired differences 1{reject at v} − 1{reject at w}.
    pub diff: f64,
    pub std_error: f64,
    pub reps: usize,
}

/// Compares P(⟨Z+v⟩_p > c) with P(⟨Z+w⟩_p > c) for w² ≺ v², using the same
/// Z for both shifts and a 3σ rule on the paired difference.
pub fn schur2_check(p: ExtendedP, c: f64, v: &[f64], w: &[f64], reps: usize, rng: &RngStream) -> Result<Schur2Report> {
    check_reps(reps)?;
    if !majorizes_squares(v, w) {
        return Err(Error::domain("schur2_check needs w² ≺ v² (equal sums of squares, dominating prefix sums)"));
    }
    let d = v.len();
    let k = Kernel::new(p);
    let thr = k.threshold(c);
    let counts = run_chunks(reps, rng, |r, count| {
        let mut z = vec![0.0; d];
        let (mut hv, mut hw, mut both) = (0u64, 0u64, 0u64);
        for _ in 0..count {
            r.fill_normal(&mut z);
            let a = k.rejects(k.reduce(&z, v), thr);
            let b = k.rejects(k.reduce(&z, w), thr);
            hv += a as u64;
            hw += b as u64;
            both += (a && b) as u64;
        }
        (hv, hw, both)
    });
    let (hv, hw, both) = counts.into_iter().fold((0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let m = reps as f64;
    let (pv, pw) = (hv as f64 / m, hw as f64 / m);
    // D ∈ {−1, 0, 1}; E D² = P(exactly one rejects)
    let diff = pv - pw;
    let e2 = (hv + hw - 2 * both) as f64 / m;
    let std_error = ((e2 - diff * diff).max(0.0) / m).sqrt();
    let pv_ = p.value();
    let outcome = if diff.abs() <= 3.0 * std_error {
        Schur2Outcome::Inconclusive
    } else if diff > 0.0 {
        if pv_ > 2.0 {
            Schur2Outcome::ConsistentConvex
        } else {
            Schur2Outcome::Violation
        }
    } else if pv_ < 2.0 {
        Schur2Outcome::ConsistentConcave
    } else {
        Schur2Outcome::Violation
    };
    Ok(Schur2Report { outcome, power_v: pv, power_w: pw, diff, std_error, reps })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionRow {
    pub d: usize,
    /// d^{(p−2)/(4p)}.
    pub threshold: f64,
    /// Fraction of uniform directions on the √d-sphere with ⟨u⟩_p below the threshold.
    pub fraction: f64,
    pub reps: usize,
}

/// For u uniform on the sphere of radius √d, the fraction of draws with ⟨u⟩_p < d^{(p−2)/(4p)}.
pub fn random_direction_check(p: f64, d_list: &[usize], reps: usize, rng: &RngStream) -> Result<Vec<DirectionRow>> {
    if !(p > 2.0) || !p.is_finite() {
        return Err(Error::domain(format!("random_direction_check needs finite p > 2, got {p}")));
    }
    if reps == 0 {
        return Err(Error::Config("random_direction_check needs reps ≥ 1".into()));
    }
    let xp = ExtendedP::Finite(p);
    d_list
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if d == 0 {
                return Err(Error::domain("dimension must be ≥ 1"));
            }
            let threshold = (d as f64).powf((p - 2.0) / (4.0 * p));
            let sub = rng.substream(rng.stream().wrapping_add(i as u64 + 1));
            let hits: u64 = run_chunks(reps, &sub, |r, count| {
                let mut z = vec![0.0; d];
                let mut h = 0u64;
                for _ in 0..count {
                    r.fill_normal(&mut z);
                    let scale = (d as f64).sqrt() / z.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let u: Vec<f64> = z.iter().map(|x| x * scale).collect();
                    h += (pmean(xp, &u) < threshold) as u64;
                }
                h
            })
            .into_iter()
            .sum();
            Ok(DirectionRow { d, threshold, fraction: hits as f64 / reps as f64, reps })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xp(p: f64) -> ExtendedP {
        ExtendedP::new(p)
    }

    #[test]
    fn reps_floor() {
        let rng = RngStream::new(1, 0);
        assert!(matches!(empirical_power(xp(2.0), 5, &[], 1.0, 999, &rng), Err(Error::Config(_))));
        assert!(matches!(empirical_critval(xp(2.0), 5, 0.05, 10, &rng), Err(Error::Config(_))));
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let rng = RngStream::new(42, 3);
        let a = empirical_critval(xp(1.0), 20, 0.05, 5000, &rng).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| empirical_critval(xp(1.0), 20, 0.05, 5000, &rng).unwrap());
        assert_eq!(a, b);
        let c = empirical_power(xp(-0.7), 20, &[], 0.5, 3001, &rng).unwrap();
        let e = pool.install(|| empirical_power(xp(-0.7), 20, &[], 0.5, 3001, &rng).unwrap());
        assert_eq!(c, e);
    }

    #[test]
    fn size_at_own_critical_value() {
        let rng = RngStream::new(7, 0);
        for p in [f64::NEG_INFINITY, -1.0, 0.0, 2.0, f64::INFINITY] {
            let c = empirical_critval(xp(p), 30, 0.1, 20_000, &rng).unwrap();
            let s = empirical_power(xp(p), 30, &[], c.estimate, 20_000, &RngStream::new(8, 0)).unwrap();
            assert!((s.estimate - 0.1).abs() < 4.0 * s.half_width, "p={p}: {}", s.estimate);
        }
    }

    #[test]
    fn p2_critval_matches_chi_square() {
        // ⟨Z⟩_2² = χ²_d / d; the 0.95 quantile of χ²_10 is 18.307038
        let want = (18.307_038_053_275_146f64 / 10.0).sqrt();
        let c = empirical_critval(xp(2.0), 10, 0.05, 200_000, &RngStream::new(3, 1)).unwrap();
        assert!((c.estimate - want).abs() < 2.0 * c.half_width.max(1e-3), "{c:?}");
        assert!(c.half_width < 0.01);
    }

    #[test]
    fn power_monotone_in_scale() {
        let rng = RngStream::new(11, 0);
        let d = 50;
        let c = empirical_critval(xp(1.0), d, 0.05, 20_000, &rng).unwrap().estimate;
        let mut prev: Option<MCResult> = None;
        for t in [0.5, 1.0, 1.5] {
            let s = vec![t * 0.3; d];
            let r = empirical_power(xp(1.0), d, &s, c, 20_000, &RngStream::new(12, 0)).unwrap();
            if let Some(q) = prev {
                assert!(r.estimate - r.half_width > q.estimate + q.half_width);
            }
            prev = Some(r);
        }
    }

    #[test]
    fn ks_distance_basics() {
        assert_eq!(ks_distance(&[0.5], |x| x).unwrap(), 0.5);
        assert!(ks_distance(&[], |x| x).is_err());
        let rng = &mut RngStream::new(5, 0);
        let u: Vec<f64> = (0..100_000).map(|_| rng.uniform_open()).collect();
        assert!(ks_distance(&u, |x| x.clamp(0.0, 1.0)).unwrap() < 0.01);
    }

    #[test]
    fn ks_extremes_small() {
        for p in [f64::NEG_INFINITY, f64::INFINITY] {
            let r = ks_null_limit(xp(p), 100, 20_000, &RngStream::new(9, 0)).unwrap();
            assert!(r.ks < 0.015, "p={p}: {}", r.ks);
        }
    }

    #[test]
    fn majorization() {
        let s2 = 2f64.sqrt();
        assert!(majorizes_squares(&[s2, 0.0], &[1.0, 1.0]));
        assert!(!majorizes_squares(&[1.0, 1.0], &[s2, 0.0]));
        assert!(!majorizes_squares(&[1.0, 1.0], &[1.0, 0.5]));
    }

    #[test]
    fn schur2_examples() {
        let v = [2f64.sqrt(), 0.0];
        let w = [1.0, 1.0];
        let rng = RngStream::new(21, 0);
        let r = schur2_check(ExtendedP::PosInf, 1.5, &v, &w, 200_000, &rng).unwrap();
        assert_eq!(r.outcome, Schur2Outcome::ConsistentConvex, "{r:?}");
        let r = schur2_check(xp(1.0), 1.5, &v, &w, 200_000, &rng).unwrap();
        assert_eq!(r.outcome, Schur2Outcome::ConsistentConcave, "{r:?}");
        let r = schur2_check(xp(2.0), 1.5, &v, &w, 200_000, &rng).unwrap();
        assert_eq!(r.outcome, Schur2Outcome::Inconclusive, "{r:?}");
        assert!(schur2_check(xp(1.0), 1.5, &w, &v, 2000, &rng).is_err());
    }

    #[test]
    fn random_directions() {
        let rows = random_direction_check(3.0, &[100, 10_000], 1000, &RngStream::new(2, 0)).unwrap();
        assert!(rows[1].fraction >= 0.99, "{rows:?}");
        let again = random_direction_check(3.0, &[100, 10_000], 1000, &RngStream::new(2, 0)).unwrap();
        assert_eq!(rows, again);
        assert!(random_direction_check(2.0, &[10], 1000, &RngStream::new(2, 0)).is_err());
    }
}
