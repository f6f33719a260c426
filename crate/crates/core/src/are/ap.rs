//! The efficiency constant a_p and the Gamma-ratio inequality behind a_p < 1.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::Result;
use crate::moments::{lambda_p, lambda_pm, ExtendedP};
use crate::num::ln_gamma;

const LN_SQRT_PI: f64 = 0.572_364_942_924_700_1;
const ZETA3: f64 = 1.202_056_903_159_594_3;
const ZETA5: f64 = 1.036_927_755_143_369_9;

/// Below this |p| the series for ln r(p) replaces the Gamma differences.
pub const SERIES_CUTOFF: f64 = 1e-3;

/// ln r(p) by its Taylor series at 0 through p⁵, with ψ^{(k)}(1/2) in closed form.
fn ln_r_series(p: f64) -> f64 {
    // coefficient of p^k is ψ^{(k−1)}(1/2)(1 − 2^{1−k})/k!
    let c2 = PI * PI / 8.0;
    let c3 = -14.0 * ZETA3 / 8.0;
    let c4 = 7.0 * PI.powi(4) / 192.0;
    let c5 = -744.0 * ZETA5 * 15.0 / (16.0 * 120.0);
    p * p * (c2 + p * (c3 + p * (c4 + p * c5)))
}

fn ln_r(p: f64) -> f64 {
    if p.abs() < SERIES_CUTOFF {
        ln_r_series(p)
    } else {
        LN_SQRT_PI + ln_gamma(p + 0.5) - 2.0 * ln_gamma(0.5 * (p + 1.0))
    }
}

/// r(p) = Γ(1/2)Γ(p+1/2)/Γ((p+1)/2)², for p > −1/2.
pub fn r(p: f64) -> f64 {
    ln_r(p).exp()
}

/// First rational lower bound: r = r₁·r̃₁ with r̃₁ > 1 off p = 0.
pub fn r1(p: f64) -> f64 {
    let h = 0.5 * (p + 1.0);
    h * h / (0.5 * (p + 0.5))
}

/// Second rational lower bound: r = r₂·r̃₂ with r̃₂ > 1 off p = 2.
pub fn r2(p: f64) -> f64 {
    let h = 0.5 * (p + 1.0);
    let mut prod = (p + 1.0).powi(2) / 3.0;
    for j in 1..=3 {
        let j = j as f64;
        prod *= (h + j).powi(2) / ((1.5 + j) * (p - 0.5 + j));
    }
    prod
}

/// Exponential-rational lower bound from the duplication formula.
pub fn r3(p: f64) -> f64 {
    let h = 0.5 * (p + 1.0);
    let mut prod = 2f64.powf(p - 0.5);
    for j in 0..=1 {
        let j = j as f64;
        prod *= (h + j).powi(2) / ((0.5 * p + 0.25 + j) * (0.5 * p + 0.75 + j));
    }
    prod
}

/// a_p on the extended line: 0 on [−∞, −1/2] and at ∞, 2/π at 0, 1 at 2.
pub fn a_p(p: ExtendedP) -> f64 {
    match p {
        ExtendedP::NegInf | ExtendedP::PosInf => 0.0,
        ExtendedP::Finite(p) => {
            if p <= -0.5 {
                0.0
            } else if p == 0.0 {
                2.0 / PI
            } else if p == 2.0 {
                1.0
            } else {
                // a_p = |p| / √(2(r(p) − 1))
                p.abs() / (2.0 * ln_r(p).exp_m1()).sqrt()
            }
        }
    }
}

/// a_p through Gaussian moments: (|p| λ_p(0)/2)·√2/√λ_{p,2}(0), for p > −1/2, p ≠ 0.
pub fn a_p_via_moments(p: f64) -> Result<f64> {
    let lam = lambda_p(p, 0.0)?;
    let var = lambda_pm(p, 2.0, 0.0)?;
    Ok(p.abs() * lam / 2.0 * 2f64.sqrt() / var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApBoundPoint {
    pub p: f64,
    /// r(p) − (1 + p²/2).
    pub margin: f64,
    /// max(r₁, r₂, r₃) − (1 + p²/2).
    pub bound_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApBoundReport {
    pub checked: usize,
    /// Grid points with r(p) ≤ 1 + p²/2.
    pub violations: Vec<f64>,
    /// Grid points where none of r₁, r₂, r₃ exceeds 1 + p²/2.
    pub bound_failures: Vec<f64>,
    pub min_margin: Option<ApBoundPoint>,
}

pub fn ap_bound_point(p: f64) -> ApBoundPoint {
    let rhs = 1.0 + 0.5 * p * p;
    ApBoundPoint { p, margin: r(p) - rhs, bound_margin: r1(p).max(r2(p)).max(r3(p)) - rhs }
}

/// Checks r(p) > 1 + p²/2 and max(r₁, r₂, r₃) > 1 + p²/2 on the grid.
/// Points outside (−1/2, ∞) and the equality points 0 and 2 are skipped.
pub fn verify_ap_bound(p_grid: &[f64]) -> ApBoundReport {
    let mut report = ApBoundReport { checked: 0, violations: Vec::new(), bound_failures: Vec::new(), min_margin: None };
    for &p in p_grid {
        if !(p > -0.5) || !p.is_finite() || p == 0.0 || p == 2.0 {
            continue;
        }
        let pt = ap_bound_point(p);
        report.checked += 1;
        if !(pt.margin > 0.0) {
            report.violations.push(p);
        }
        if !(pt.bound_margin > 0.0) {
            report.bound_failures.push(p);
        }
        // relative margin, since both sides grow quickly in p
        let rel = |q: &ApBoundPoint| q.margin / (1.0 + 0.5 * q.p * q.p);
        if report.min_margin.as_ref().is_none_or(|m| rel(&pt) < rel(m)) {
            report.min_margin = Some(pt);
        }
    }
    report
}

/// ψ(x) = 2x/(2|x| + 3), with ψ(±∞) = ±1.
pub fn psi(x: f64) -> f64 {
    if x.is_infinite() {
        x.signum()
    } else {
        2.0 * x / (2.0 * x.abs() + 3.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApPoint {
    pub p: ExtendedP,
    pub a: f64,
    /// ψ(p/4).
    pub psi_p: f64,
    /// ψ(a_p).
    pub psi_a: f64,
}

/// Tabulates (p, a_p) with the ψ-transformed coordinates.
pub fn ap_curve(p_samples: &[ExtendedP]) -> Vec<ApPoint> {
    p_samples
        .iter()
        .map(|&p| {
            let a = a_p(p);
            ApPoint { p, a, psi_p: psi(p.value() / 4.0), psi_a: psi(a) }
        })
        .collect()
}

/// from, from + step, … up to `to` (inclusive within step/2). When 1/step and
/// from/step are integers the points are formed as integer ratios, so decimal
/// grids hit values like 2 exactly.
pub fn grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || !(to >= from) || !from.is_finite() || !to.is_finite() {
        return Vec::new();
    }
    let n = ((to - from) / step + 0.5).floor() as i64;
    let m = (1.0 / step).round();
    let k0 = (from * m).round();
    let exact = ((1.0 / step) - m).abs() < 1e-9 * m && (from * m - k0).abs() < 1e-6;
    (0..=n)
        .map(|k| if exact { (k0 + k as f64) / m } else { from + k as f64 * step })
        .collect()
}
