//! Asymptotic relative efficiency of the p-test against the 2-test: the
//! constant a_p, the ‖·‖_{p,2} functional, the d → ∞ classification by growth
//! rates, exact values at d ≤ 3, and block directions attaining intermediate values.

pub mod ap;
pub mod block;
pub mod finite;
pub mod orlicz;

use serde::Serialize;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::moments::ExtendedP;
use crate::ptest::pmean;
use crate::regime::check_levels;

pub use ap::{a_p, ap_curve, psi, verify_ap_bound, ApBoundReport, ApPoint};
pub use block::{block_direction, block_for_target, Block};
pub use finite::{are_finite, FiniteAre};
pub use orlicz::orlicz_norm;

/// Default half-width of the band around the threshold exponent.
pub const DEAD_BAND: f64 = 0.02;

/// Why a verdict was reached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rationale {
    /// Line of the d → ∞ classification (1 to 9) that fired.
    pub line: u8,
    /// The growing quantity that was compared, if any.
    pub quantity: Option<String>,
    /// Fitted log-log slope of the quantity against d.
    pub slope: Option<f64>,
    /// Fitted log-log slope of the threshold function.
    pub threshold_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "tag")]
pub enum AREVerdict {
    Zero { rationale: Rationale },
    Finite { value: f64, rationale: Rationale },
    Infinite { rationale: Rationale },
    /// The ARE, if it exists, lies in (0, hi].
    IntervalBound { hi: f64, rationale: Rationale },
}

impl AREVerdict {
    pub fn rationale(&self) -> &Rationale {
        match self {
            AREVerdict::Zero { rationale }
            | AREVerdict::Finite { rationale, .. }
            | AREVerdict::Infinite { rationale }
            | AREVerdict::IntervalBound { rationale, .. } => rationale,
        }
    }

    /// A representative number: the value, the upper bound, 0 or ∞.
    pub fn value(&self) -> f64 {
        match self {
            AREVerdict::Zero { .. } => 0.0,
            AREVerdict::Finite { value, .. } => *value,
            AREVerdict::Infinite { .. } => f64::INFINITY,
            AREVerdict::IntervalBound { hi, .. } => *hi,
        }
    }
}

type Generator = Arc<dyn Fn(usize) -> Vec<f64> + Send + Sync>;

/// A direction varying with d, evaluated at a finite list of probe dimensions.
#[derive(Clone)]
pub struct DirectionSequence {
    name: String,
    generator: Generator,
    probes: Vec<usize>,
}

impl fmt::Debug for DirectionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirectionSequence").field("name", &self.name).field("probes", &self.probes).finish()
    }
}

impl DirectionSequence {
    /// Wraps a generator; every probe vector must have length d and ⟨u⟩₂ = 1 to 1e−12.
    pub fn new(name: impl Into<String>, generator: impl Fn(usize) -> Vec<f64> + Send + Sync + 'static, probes: Vec<usize>) -> Result<Self> {
        if probes.is_empty() || probes.contains(&0) {
            return Err(Error::domain("probe dimensions must be positive"));
        }
        let seq = DirectionSequence { name: name.into(), generator: Arc::new(generator), probes };
        for &d in &seq.probes {
            seq.at(d)?;
        }
        Ok(seq)
    }

    /// As [`DirectionSequence::new`], rescaling each generated vector to ⟨u⟩₂ = 1.
    pub fn normalized(name: impl Into<String>, generator: impl Fn(usize) -> Vec<f64> + Send + Sync + 'static, probes: Vec<usize>) -> Result<Self> {
        Self::new(
            name,
            move |d| {
                let v = generator(d);
                let n2 = pmean(ExtendedP::Finite(2.0), &v);
                v.into_iter().map(|x| x / n2).collect()
            },
            probes,
        )
    }

    /// u = 1_d.
    pub fn equalized(probes: Vec<usize>) -> Result<Self> {
        Self::new("equalized", |d| vec![1.0; d], probes)
    }

    /// u = √d·e₁.
    pub fn spike(probes: Vec<usize>) -> Result<Self> {
        Self::new(
            "spike",
            |d| {
                let mut v = vec![0.0; d];
                v[0] = (d as f64).sqrt();
                v
            },
            probes,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn probes(&self) -> &[usize] {
        &self.probes
    }

    /// u(d), checked for length and ⟨u⟩₂ = 1.
    pub fn at(&self, d: usize) -> Result<Vec<f64>> {
        let u = (self.generator)(d);
        if u.len() != d {
            return Err(Error::domain(format!("generator returned length {} at d = {d}", u.len())));
        }
        let n2 = pmean(ExtendedP::Finite(2.0), &u);
        if !((n2 - 1.0).abs() <= 1e-12) {
            return Err(Error::domain(format!("⟨u⟩₂ = {n2} at d = {d}, expected 1")));
        }
        Ok(u)
    }

    fn is_equalized(&self) -> Result<bool> {
        for &d in &self.probes {
            if !self.at(d)?.iter().all(|x| (x.abs() - 1.0).abs() <= 1e-12) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Least-squares slope of ln y against ln x.
fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Classifies ARE_{p,2,u} as d → ∞ from the growth of ⟨u⟩_p, ‖u‖_{p,2} or
/// ⟨u⟩_∞ over the probe dimensions, with the default dead band.
pub fn classify_are(p: ExtendedP, useq: &DirectionSequence, alpha: f64, beta: f64) -> Result<AREVerdict> {
    classify_are_with_band(p, useq, alpha, beta, DEAD_BAND)
}

pub fn classify_are_with_band(p: ExtendedP, useq: &DirectionSequence, alpha: f64, beta: f64, band: f64) -> Result<AREVerdict> {
    check_levels(alpha, beta)?;
    if !(band >= 0.0) {
        return Err(Error::Config(format!("dead band must be nonnegative, got {band}")));
    }
    let plain = |line| Rationale { line, quantity: None, slope: None, threshold_slope: None };
    let pv = p.value();
    if pv <= -0.5 {
        return Ok(AREVerdict::Zero { rationale: plain(1) });
    }
    if pv == 2.0 {
        return Ok(AREVerdict::Finite { value: 1.0, rationale: plain(5) });
    }
    let probes = useq.probes();
    let (lo, hi) = (*probes.iter().min().unwrap(), *probes.iter().max().unwrap());
    if (hi as f64) < 1000.0 * lo as f64 || lo < 2 {
        return Err(Error::domain(format!("probe dimensions must span at least 3 decades from d ≥ 2, got {lo}..{hi}")));
    }
    let ds: Vec<f64> = probes.iter().map(|&d| d as f64).collect();
    let ap = a_p(p);

    if pv < 2.0 {
        if useq.is_equalized()? {
            return Ok(AREVerdict::Finite { value: ap, rationale: plain(4) });
        }
        let mut norms = Vec::with_capacity(probes.len());
        for &d in probes {
            norms.push(orlicz_norm(pv, alpha, beta, &useq.at(d)?)?);
        }
        let quantity = Some("‖u‖_{p,2}".to_string());
        if norms.contains(&0.0) {
            // a vanishing functional is ≪ d^{1/4} outright
            return Ok(AREVerdict::Zero { rationale: Rationale { line: 2, quantity, slope: None, threshold_slope: Some(0.25) } });
        }
        let slope = loglog_slope(&ds, &norms);
        let rationale = Rationale { line: 2, quantity, slope: Some(slope), threshold_slope: Some(0.25) };
        // ‖u‖_{p,2} ≤ ‖1‖_{p,2} ≍ d^{1/4}, so a slope in the band is the ≍ case of line 3
        return Ok(if slope >= 0.25 - band {
            AREVerdict::IntervalBound { hi: ap, rationale: Rationale { line: 3, ..rationale } }
        } else {
            AREVerdict::Zero { rationale }
        });
    }

    let (quantity, thr): (&str, Box<dyn Fn(f64) -> f64>) = if p == ExtendedP::PosInf {
        ("⟨u⟩_∞", Box::new(|d: f64| d.powf(0.25) * d.ln().sqrt()))
    } else {
        ("⟨u⟩_p", Box::new(move |d: f64| d.powf((pv - 2.0) / (4.0 * pv))))
    };
    let mut stats = Vec::with_capacity(probes.len());
    for &d in probes {
        stats.push(pmean(p, &useq.at(d)?));
    }
    let thresholds: Vec<f64> = ds.iter().map(|&d| thr(d)).collect();
    let slope = loglog_slope(&ds, &stats);
    let tslope = loglog_slope(&ds, &thresholds);
    let (small, large) = if p == ExtendedP::PosInf { (8, 9) } else { (6, 7) };
    let rationale = |line| Rationale { line, quantity: Some(quantity.to_string()), slope: Some(slope), threshold_slope: Some(tslope) };
    if slope < tslope - band {
        Ok(if p == ExtendedP::PosInf {
            AREVerdict::Zero { rationale: rationale(small) }
        } else {
            AREVerdict::Finite { value: ap, rationale: rationale(small) }
        })
    } else if slope > tslope + band {
        Ok(AREVerdict::Infinite { rationale: rationale(large) })
    } else {
        Err(Error::Indeterminate { slope, threshold: tslope, band })
    }
}
