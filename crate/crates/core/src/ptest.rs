//! The p-mean test: statistic, decision, critical values, asymptotic power,
//! sample size and feasibility.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mc::{empirical_critval, MCResult};
use crate::moments::{ExtendedP, Regime};
use crate::num::{compensated_sum, find_root, RngStream, ROOT_TOL};
use crate::regime::{check_levels, null_row, regime_row, RegimeRow};

/// ⟨s⟩_p with the conventions 0^p = ∞ and ∞^{1/p} = 0 for p < 0.
///
/// # Panics
/// On an empty vector.
pub fn pmean(p: ExtendedP, s: &[f64]) -> f64 {
    assert!(!s.is_empty(), "p-mean of an empty vector");
    let d = s.len() as f64;
    let abs = s.iter().map(|x| x.abs());
    match p {
        ExtendedP::NegInf => abs.fold(f64::INFINITY, f64::min),
        ExtendedP::PosInf => abs.fold(0.0, f64::max),
        ExtendedP::Finite(0.0) => {
            if s.contains(&0.0) {
                return 0.0;
            }
            (compensated_sum(abs.map(f64::ln)) / d).exp()
        }
        ExtendedP::Finite(p) => {
            // factor out the dominant coordinate so no term over- or underflows
            let m = if p > 0.0 { abs.fold(0.0, f64::max) } else { abs.fold(f64::INFINITY, f64::min) };
            if m == 0.0 {
                return 0.0;
            }
            let mean = compensated_sum(s.iter().map(|x| (x.abs() / m).powf(p))) / d;
            m * mean.powf(1.0 / p)
        }
    }
}

/// δ_{n,p,c}: rejects iff √n·⟨x̄⟩_p > c.
pub fn decide(p: ExtendedP, c: f64, n: u64, sample_mean: &[f64]) -> bool {
    (n as f64).sqrt() * pmean(p, sample_mean) > c
}

/// A reduced form r(x) of the statistic that is cheap to evaluate and
/// monotone in ⟨x⟩_p: the mean of |x_j|^p, the mean of ln|x_j|, or the
/// min/max of |x_j|. Increasing in ⟨x⟩_p except for p < 0, where it decreases.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernel {
    p: ExtendedP,
}

#[inline(always)]
fn fold_shifted(z: &[f64], s: &[f64], init: f64, step: impl Fn(f64, f64) -> f64) -> f64 {
    if s.is_empty() {
        z.iter().fold(init, |acc, &x| step(acc, x))
    } else {
        z.iter().zip(s).fold(init, |acc, (&x, &m)| step(acc, x + m))
    }
}

impl Kernel {
    pub(crate) fn new(p: ExtendedP) -> Self {
        Kernel { p }
    }

    /// r(z + s); an empty `s` means no shift.
    pub(crate) fn reduce(&self, z: &[f64], s: &[f64]) -> f64 {
        let d = z.len() as f64;
        let sum = |g: &dyn Fn(f64) -> f64| fold_shifted(z, s, 0.0, |a, x| a + g(x));
        match self.p {
            ExtendedP::NegInf => fold_shifted(z, s, f64::INFINITY, |a, x| a.min(x.abs())),
            ExtendedP::PosInf => fold_shifted(z, s, 0.0, |a, x| a.max(x.abs())),
            ExtendedP::Finite(p) => {
                let total = if p == 2.0 {
                    fold_shifted(z, s, 0.0, |a, x| a + x * x)
                } else if p == 1.0 {
                    fold_shifted(z, s, 0.0, |a, x| a + x.abs())
                } else if p == 3.0 {
                    fold_shifted(z, s, 0.0, |a, x| a + (x * x * x).abs())
                } else if p == -1.0 {
                    fold_shifted(z, s, 0.0, |a, x| a + 1.0 / x.abs())
                } else if p == -2.0 {
                    fold_shifted(z, s, 0.0, |a, x| a + 1.0 / (x * x))
                } else if p == -0.5 {
                    fold_shifted(z, s, 0.0, |a, x| a + 1.0 / x.abs().sqrt())
                } else if p == 0.0 {
                    fold_shifted(z, s, 0.0, |a, x| a + x.abs().ln())
                } else {
                    sum(&|x: f64| x.abs().powf(p))
                };
                total / d
            }
        }
    }

    /// ⟨x⟩_p from r(x).
    pub(crate) fn to_pmean(self, r: f64) -> f64 {
        match self.p {
            ExtendedP::NegInf | ExtendedP::PosInf => r,
            ExtendedP::Finite(0.0) => r.exp(),
            ExtendedP::Finite(p) => r.powf(1.0 / p),
        }
    }

    /// r-scale threshold equivalent to ⟨x⟩_p = c.
    pub(crate) fn threshold(&self, c: f64) -> f64 {
        match self.p {
            ExtendedP::NegInf | ExtendedP::PosInf => c,
            ExtendedP::Finite(0.0) => c.ln(),
            ExtendedP::Finite(p) => c.powf(p),
        }
    }

    /// ⟨x⟩_p > c expressed on the r scale.
    #[inline]
    pub(crate) fn rejects(&self, r: f64, thr: f64) -> bool {
        match self.p {
            ExtendedP::Finite(p) if p < 0.0 => r < thr,
            _ => r > thr,
        }
    }
}

/// Shift vector s with its cached count of exact zeros.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftVector {
    entries: Vec<f64>,
    d0: usize,
}

impl ShiftVector {
    /// Zero entries are counted by exact equality; threshold noisy input upstream.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("shift vector must be nonempty"));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("shift entries must be finite"));
        }
        let d0 = entries.iter().filter(|&&x| x == 0.0).count();
        Ok(ShiftVector { entries, d0 })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn d(&self) -> usize {
        self.entries.len()
    }

    pub fn d0(&self) -> usize {
        self.d0
    }

    /// t·s.
    pub fn scaled(&self, t: f64) -> ShiftVector {
        let entries: Vec<f64> = self.entries.iter().map(|x| t * x).collect();
        let d0 = entries.iter().filter(|&&x| x == 0.0).count();
        ShiftVector { entries, d0 }
    }
}

/// (p, d, α, β, θ₁): the unit of work for power and sample-size queries.
#[derive(Debug, Clone, Serialize)]
pub struct TestPlan {
    pub p: ExtendedP,
    pub alpha: f64,
    pub beta: f64,
    theta: ShiftVector,
}

impl TestPlan {
    /// Plan with an explicit alternative θ₁ ∈ R^d.
    pub fn with_vector(p: ExtendedP, alpha: f64, beta: f64, theta: Vec<f64>) -> Result<Self> {
        check_levels(alpha, beta)?;
        let theta = ShiftVector::new(theta)?;
        if theta.d0() == theta.d() {
            return Err(Error::domain("alternative θ₁ must be nonzero"));
        }
        Ok(TestPlan { p, alpha, beta, theta })
    }

    /// Plan with a direction u; θ₁ is u rescaled to Euclidean norm 1, i.e. ⟨θ₁⟩₂ = 1/√d.
    pub fn with_direction(p: ExtendedP, alpha: f64, beta: f64, u: Vec<f64>) -> Result<Self> {
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain("direction must be nonzero and finite"));
        }
        Self::with_vector(p, alpha, beta, u.into_iter().map(|x| x / norm).collect())
    }

    pub fn d(&self) -> usize {
        self.theta.d()
    }

    pub fn d0(&self) -> usize {
        self.theta.d0()
    }

    pub fn theta(&self) -> &[f64] {
        self.theta.entries()
    }

    /// The direction u = θ₁/⟨θ₁⟩₂, so that ⟨u⟩₂ = 1.
    pub fn direction(&self) -> Vec<f64> {
        let n2 = pmean(ExtendedP::Finite(2.0), self.theta());
        self.theta().iter().map(|x| x / n2).collect()
    }

    pub fn row(&self) -> Result<RegimeRow> {
        regime_row(self.p, self.alpha, self.beta, self.d())
    }
}

/// How to obtain a critical value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CritMethod {
    Asymptotic,
    MonteCarlo { reps: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalValue {
    pub value: f64,
    /// 95% half-width for Monte Carlo values; zero for asymptotic ones.
    pub half_width: f64,
    pub method: CritMethod,
}

/// Critical value c in ⟨·⟩_p units with P(⟨Z⟩_p > c) ≈ α, Z ~ N(0, I_d).
pub fn critical_value(p: ExtendedP, d: usize, alpha: f64, method: CritMethod) -> Result<CriticalValue> {
    match method {
        CritMethod::Asymptotic => {
            let value = null_row(p, alpha, d)?.critical_value()?;
            Ok(CriticalValue { value, half_width: 0.0, method })
        }
        CritMethod::MonteCarlo { reps, seed } => {
            let MCResult { estimate, half_width, .. } = empirical_critval(p, d, alpha, reps, &RngStream::new(seed, 0))?;
            Ok(CriticalValue { value: estimate, half_width, method })
        }
    }
}

/// Asymptotic power at shift s = √n·θ₁, from the row's limit law.
pub fn power_asymptotic(p: ExtendedP, d: usize, alpha: f64, shift: &ShiftVector) -> Result<f64> {
    if shift.d() != d {
        return Err(Error::domain(format!("shift has dimension {}, expected {d}", shift.d())));
    }
    power_with_row(&null_row(p, alpha, d)?, shift)
}

pub fn power_with_row(row: &RegimeRow, shift: &ShiftVector) -> Result<f64> {
    row.power_from_excess(row.sum_excess(shift.entries())?)
}

/// (Σ f_p(s_j) − K κ_p(d)) / κ_p(d) on the centered scale.
pub fn as_shift_residual(p: ExtendedP, d: usize, alpha: f64, beta: f64, s: &ShiftVector) -> Result<f64> {
    if s.d() != d {
        return Err(Error::domain(format!("shift has dimension {}, expected {d}", s.d())));
    }
    regime_row(p, alpha, beta, d)?.residual(s.entries())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Feasibility {
    Feasible,
    Infeasible { threshold: f64, d0: usize },
}

/// Largest d₀ allowed by the sharp feasibility line of the row, or None for p ≥ 0.
pub fn feasibility_threshold(row: &RegimeRow) -> Option<f64> {
    let d = row.d as f64;
    let k = row.k;
    match row.regime {
        Regime::NegInf | Regime::BelowNegOne => Some(k * d),
        Regime::NegOne => Some(d - (std::f64::consts::PI / 2.0).sqrt() * k * d / d.ln()),
        Regime::NegOneToNegHalf | Regime::NegHalfToZero => {
            let p = row.p.value();
            Some(d - k / crate::moments::lambda_p0(p) * d.powf(p.abs().max(0.5)))
        }
        Regime::NegHalf => Some(d - k / crate::moments::lambda_p0(-0.5) * (d * d.ln()).sqrt()),
        Regime::Zero | Regime::ZeroToInf | Regime::PosInf => None,
    }
}

/// Compares d₀(u) with the sharp threshold; `slack` (a fraction of d) relaxes it.
pub fn feasibility(plan: &TestPlan, slack: f64) -> Result<Feasibility> {
    feasibility_with_row(&plan.row()?, plan.d0(), slack)
}

pub fn feasibility_with_row(row: &RegimeRow, d0: usize, slack: f64) -> Result<Feasibility> {
    if !(slack >= 0.0) {
        return Err(Error::Config(format!("feasibility slack must be ≥ 0, got {slack}")));
    }
    Ok(match feasibility_threshold(row) {
        Some(threshold) if d0 as f64 > threshold + slack * row.d as f64 => Feasibility::Infeasible { threshold, d0 },
        _ => Feasibility::Feasible,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSize {
    pub n: u64,
    /// Continuous solution t* of Σ f_p(t θ₁ⱼ) = K κ_p(d); n = ⌈t*²⌉.
    pub t: f64,
    /// Asymptotic power at n.
    pub power: f64,
}

/// Smallest n whose asymptotic power reaches β.
pub fn sample_size(plan: &TestPlan) -> Result<SampleSize> {
    sample_size_with_row(plan, &plan.row()?)
}

pub fn sample_size_with_row(plan: &TestPlan, row: &RegimeRow) -> Result<SampleSize> {
    if let Feasibility::Infeasible { threshold, d0 } = feasibility_with_row(row, plan.d0(), 0.0)? {
        return Err(Error::Infeasible { threshold, d0 });
    }
    let target = row.target();
    let theta = plan.theta();
    let d = plan.d();
    let nonzero = (d - plan.d0()) as f64;
    if nonzero * row.excess_sup() <= target {
        // the finite-d supremum of Σ excess falls short even though the sharp line passed
        let threshold = d as f64 - target / row.excess_sup();
        return Err(Error::Infeasible { threshold, d0: plan.d0() });
    }
    let scaled = |t: f64| -> Vec<f64> { theta.iter().map(|x| t * x).collect() };
    let mut err = None;
    let mut g = |t: f64| match row.sum_excess(&scaled(t)) {
        Ok(v) => v - target,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    };
    let mut hi = 1.0;
    let mut grown = 0;
    while !(g(hi) > 0.0) {
        hi *= 2.0;
        grown += 1;
        if !hi.is_finite() {
            return Err(Error::Bracket { lo: 0.0, hi });
        }
    }
    let lo = if grown == 0 { 0.0 } else { hi / 2.0 };
    let t = find_root(&mut g, lo, hi, ROOT_TOL * hi);
    if let Some(e) = err {
        return Err(e);
    }
    let t = t?;
    let n_real = (t * t).ceil();
    if n_real > 9.007_199_254_740_992e15 {
        return Err(Error::domain(format!("sample size {n_real} exceeds the exact integer range")));
    }
    let n = (n_real as u64).max(1);
    let power = power_with_row(row, &ShiftVector::new(scaled((n as f64).sqrt()))?)?;
    Ok(SampleSize { n, t, power })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::normal_quantile;

    fn xp(p: f64) -> ExtendedP {
        ExtendedP::new(p)
    }

    #[test]
    fn pmean_examples() {
        assert!((pmean(xp(2.0), &[3.0, 4.0]) - 12.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(pmean(xp(-1.0), &[1.0, 0.0]), 0.0);
        assert!((pmean(xp(0.0), &[2.0, 8.0]) - 4.0).abs() < 1e-15);
        assert_eq!(pmean(ExtendedP::NegInf, &[-3.0, 2.0, 5.0]), 2.0);
        assert_eq!(pmean(ExtendedP::PosInf, &[-3.0, 2.0, 5.0]), 5.0);
        assert_eq!(pmean(xp(0.0), &[0.0, 5.0]), 0.0);
    }

    #[test]
    fn pmean_of_ones() {
        for d in [1, 2, 17] {
            let v = vec![1.0; d];
            for p in [f64::NEG_INFINITY, -3.0, -1.0, -0.5, 0.0, 0.5, 2.0, 7.0, f64::INFINITY] {
                assert!((pmean(xp(p), &v) - 1.0).abs() < 1e-15, "p={p} d={d}");
            }
        }
    }

    #[test]
    fn pmean_of_spike() {
        for d in [4usize, 50, 1000] {
            let mut v = vec![0.0; d];
            v[0] = (d as f64).sqrt();
            for p in [2.0, 3.0, 10.0] {
                let want = (d as f64).powf((p - 2.0) / (2.0 * p));
                assert!((pmean(xp(p), &v) / want - 1.0).abs() < 1e-13);
            }
            assert_eq!(pmean(ExtendedP::PosInf, &v), (d as f64).sqrt());
        }
    }

    #[test]
    fn pmean_no_overflow() {
        let v = [1e-200, 1.0, 2.0];
        assert!(pmean(xp(-3.0), &v) > 0.0);
        let w = [1e200, 1.0];
        assert!(pmean(xp(4.0), &w).is_finite());
    }

    #[test]
    fn decide_examples() {
        assert!(decide(xp(2.0), 1.9, 4, &[1.0, 1.0]));
        assert!(!decide(xp(2.0), 2.0, 4, &[1.0, 1.0]));
        assert!(!decide(xp(-1.0), 0.1, 100, &[1.0, 0.0, 3.0]));
    }

    #[test]
    fn kernel_agrees_with_pmean() {
        let z = [0.3, -1.2, 2.5, -0.01, 0.8];
        let s = [0.1, 0.0, -0.4, 1.0, 0.0];
        let x: Vec<f64> = z.iter().zip(&s).map(|(a, b)| a + b).collect();
        for p in [f64::NEG_INFINITY, -2.0, -1.0, -0.7, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 7.0, f64::INFINITY] {
            let k = Kernel::new(xp(p));
            let got = k.to_pmean(k.reduce(&z, &s));
            assert!((got / pmean(xp(p), &x) - 1.0).abs() < 1e-12, "p={p}");
            let c = 0.9 * got;
            assert!(k.rejects(k.reduce(&z, &s), k.threshold(c)));
            assert!(!k.rejects(k.reduce(&z, &s), k.threshold(1.1 * got)));
        }
    }

    #[test]
    fn asymptotic_critical_values() {
        let c = critical_value(xp(2.0), 100, 0.05, CritMethod::Asymptotic).unwrap().value;
        assert!((c - 1.11024).abs() < 1e-5);
        let c = critical_value(ExtendedP::PosInf, 100, 0.05, CritMethod::Asymptotic).unwrap().value;
        assert!((c - 3.5324).abs() < 2e-4);
        let c = critical_value(ExtendedP::NegInf, 10_000, 0.05, CritMethod::Asymptotic).unwrap().value;
        assert!((c - 3.7547e-4).abs() < 2e-8);
    }

    #[test]
    fn mc_critval_needs_reps() {
        let r = critical_value(xp(2.0), 10, 0.05, CritMethod::MonteCarlo { reps: 999, seed: 1 });
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn power_examples() {
        let d = 100;
        for p in [f64::NEG_INFINITY, -2.0, -1.0, -0.6, -0.5, -0.3, 0.0, 1.0, 2.0, f64::INFINITY] {
            let zero = ShiftVector::new(vec![0.0; d]).unwrap();
            assert!((power_asymptotic(xp(p), d, 0.05, &zero).unwrap() - 0.05).abs() < 1e-8, "p={p}");
        }
        let k2 = (normal_quantile(0.95).unwrap() - normal_quantile(0.05).unwrap()) * 2f64.sqrt();
        let s = ShiftVector::new(vec![(k2 * 10.0 / d as f64).sqrt(); d]).unwrap();
        assert!((power_asymptotic(xp(2.0), d, 0.05, &s).unwrap() - 0.95).abs() < 1e-9);
        let s = ShiftVector::new(vec![(47.0 / d as f64).sqrt(); d]).unwrap();
        let want = crate::num::normal_cdf(normal_quantile(0.05).unwrap() + 47.0 / 200f64.sqrt());
        let got = power_asymptotic(xp(2.0), d, 0.05, &s).unwrap();
        assert!((got - want).abs() < 1e-12);
        assert!((got - 0.9534).abs() < 1e-4);
    }

    #[test]
    fn power_monotone_in_scale() {
        let base = ShiftVector::new((0..40).map(|j| 0.05 * (j % 7) as f64).collect()).unwrap();
        for p in [f64::NEG_INFINITY, -2.0, -1.0, -0.7, -0.5, 0.0, 1.0, 3.0, f64::INFINITY] {
            let mut prev = 0.0;
            for k in 1..8 {
                let b = power_asymptotic(xp(p), 40, 0.05, &base.scaled(k as f64)).unwrap();
                assert!(b > prev, "p={p} k={k}");
                prev = b;
            }
        }
    }

    #[test]
    fn sample_size_p2() {
        let d = 100;
        let theta = vec![0.1; d]; // Euclidean norm 1
        let plan = TestPlan::with_vector(xp(2.0), 0.05, 0.95, theta.clone()).unwrap();
        let ss = sample_size(&plan).unwrap();
        assert_eq!(ss.n, 47);
        let half = TestPlan::with_vector(xp(2.0), 0.05, 0.95, theta.iter().map(|x| x / 2.0).collect()).unwrap();
        assert_eq!(sample_size(&half).unwrap().n, 187);
        assert!(ss.power >= 0.95 - 1e-6);
    }

    #[test]
    fn sample_size_infeasible_spike() {
        let mut u = vec![0.0; 100];
        u[0] = 1.0;
        let plan = TestPlan::with_direction(xp(-2.0), 0.05, 0.95, u).unwrap();
        match sample_size(&plan) {
            Err(Error::Infeasible { threshold, d0 }) => {
                assert_eq!(d0, 99);
                assert!((threshold - 3.2).abs() < 0.05);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn feasibility_examples() {
        let mut u = vec![1.0; 1000];
        u[..10].iter_mut().for_each(|x| *x = 0.0);
        let plan = TestPlan::with_direction(xp(-2.0), 0.05, 0.95, u).unwrap();
        assert_eq!(feasibility(&plan, 0.0).unwrap(), Feasibility::Feasible);
        let plan = TestPlan::with_direction(xp(1.0), 0.05, 0.95, vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(feasibility(&plan, 0.0).unwrap(), Feasibility::Feasible);
        // p = −1 with the all-zero direction: every coordinate is a zero
        let d = 22_026; // ≈ e^10
        let row = regime_row(xp(-1.0), 0.05, 0.95, d).unwrap();
        assert!(matches!(feasibility_with_row(&row, d, 0.0).unwrap(), Feasibility::Infeasible { .. }));
        assert!(feasibility_with_row(&row, d, -1.0).is_err());
    }

    #[test]
    fn residual_examples() {
        let d = 50;
        let zero = ShiftVector::new(vec![0.0; d]).unwrap();
        for p in [-2.0, -0.7, 0.0, 1.0, 3.0] {
            let row = regime_row(xp(p), 0.05, 0.95, d).unwrap();
            let r = as_shift_residual(xp(p), d, 0.05, 0.95, &zero).unwrap();
            assert!((r * row.kappa / row.target() + 1.0).abs() < 1e-12, "p={p}");
        }
        let k2 = regime_row(xp(2.0), 0.05, 0.95, d).unwrap().k;
        let s = ShiftVector::new(vec![(k2 * (d as f64).sqrt() / d as f64).sqrt(); d]).unwrap();
        assert!(as_shift_residual(xp(2.0), d, 0.05, 0.95, &s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn residual_increasing() {
        let base = ShiftVector::new((0..50).map(|j| 0.02 * (1 + j % 5) as f64).collect()).unwrap();
        for p in [-0.7, 0.0, 1.0, 3.0] {
            let mut prev = f64::NEG_INFINITY;
            for k in 1..10 {
                let r = as_shift_residual(xp(p), 50, 0.05, 0.95, &base.scaled(k as f64)).unwrap();
                assert!(r > prev, "p={p}");
                prev = r;
            }
        }
    }
}
