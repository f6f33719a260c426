//! Standard normal density, distribution function and quantile.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::error::{Error, Result};

/// 1/√(2π)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Φ(x), evaluated through erfc so both tails keep full relative precision.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// 1 − Φ(x) without cancellation.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

pub fn normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("normal quantile needs q in (0,1), got {q}")));
    }
    if q == 0.5 {
        return Ok(0.0);
    }
    // work in the smaller tail, then polish with one Newton step
    let (tail, sign) = if q < 0.5 { (q, -1.0) } else { (1.0 - q, 1.0) };
    let mut x = SQRT_2 * erfc_inv(2.0 * tail);
    let pdf = normal_pdf(x);
    if pdf > 0.0 {
        x += (normal_sf(x) - tail) / pdf;
    }
    Ok(sign * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    // independent oracle: Φ via the Taylor series of erf, then bisection
    fn cdf_series(x: f64) -> f64 {
        let z = x / SQRT_2;
        let mut term = z;
        let mut sum = z;
        let mut n = 0.0;
        while term.abs() > 1e-18 * sum.abs() {
            n += 1.0;
            term *= -z * z / n;
            sum += term / (2.0 * n + 1.0);
        }
        0.5 + sum / std::f64::consts::PI.sqrt()
    }

    fn quantile_oracle(q: f64) -> f64 {
        let (mut lo, mut hi) = (-6.0, 6.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf_series(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn quantile_known_points() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        let oracle = quantile_oracle(0.975);
        assert!((oracle - 1.959_963_984_540_054).abs() < 1e-12);
        assert!((normal_quantile(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
        assert!((normal_quantile(0.05).unwrap() + 1.644_853_626_951_472_2).abs() < 1e-12);
    }

    #[test]
    fn pdf_at_zero() {
        assert!((normal_pdf(0.0) - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-16);
        assert_eq!(normal_pdf(1.3), normal_pdf(-1.3));
    }

    #[test]
    fn cdf_symmetry_grid() {
        let mut x = -8.0;
        while x <= 8.0 {
            assert!((normal_cdf(x) + normal_cdf(-x) - 1.0).abs() <= 1e-14, "x={x}");
            x += 0.01;
        }
    }

    #[test]
    fn cdf_matches_series() {
        for &x in &[-3.0, -1.0, -0.2, 0.0, 0.7, 2.5] {
            assert!((normal_cdf(x) - cdf_series(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn round_trip() {
        for k in 1..1000 {
            let q = k as f64 / 1000.0;
            let x = normal_quantile(q).unwrap();
            assert!((normal_cdf(x) - q).abs() <= 1e-12, "q={q}");
        }
        for &q in &[1e-12, 1e-8, 1e-4, 1.0 - 1e-6] {
            let x = normal_quantile(q).unwrap();
            assert!((normal_cdf(x) - q).abs() <= 1e-12 * q.max(1e-3), "q={q}");
        }
    }

    #[test]
    fn quantile_domain() {
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn cdf_increasing() {
        let mut prev = 0.0;
        for k in -400..400 {
            let v = normal_cdf(k as f64 / 50.0);
            assert!(v > prev);
            prev = v;
        }
    }
}
