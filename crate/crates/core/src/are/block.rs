//! Block directions (s, …, s, 0, …, 0) with k ≈ K_p √d / f_p(s) nonzero entries,
//! whose ARE against the 2-test tends to (K₂/K_p)·f_p(s)/s².

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{ExtendedP, Regime};
use crate::num::{find_root, ROOT_TOL};
use crate::regime::{regime_row, RegimeRow};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub d: usize,
    /// Number of nonzero entries.
    pub k: usize,
    /// Common value of the nonzero entries of the shift.
    pub s: f64,
    /// (K₂/K_p)·f_p(s)/s², the limiting ARE of the block family.
    pub predicted_are: f64,
}

impl Block {
    /// The shift (s, …, s, 0, …, 0) ∈ R^d.
    pub fn shift(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.d];
        v[..self.k].iter_mut().for_each(|x| *x = self.s);
        v
    }

    /// The same vector rescaled so that ⟨u⟩₂ = 1.
    pub fn direction(&self) -> Vec<f64> {
        let a = (self.d as f64 / self.k as f64).sqrt();
        let mut v = vec![0.0; self.d];
        v[..self.k].iter_mut().for_each(|x| *x = a);
        v
    }
}

fn block_rows(p: ExtendedP, alpha: f64, beta: f64, d: usize) -> Result<(RegimeRow, f64)> {
    match p.regime() {
        Regime::NegHalfToZero | Regime::Zero | Regime::ZeroToInf => {}
        _ => return Err(Error::domain(format!("block construction needs p in (−1/2, ∞), got {p}"))),
    }
    let row = regime_row(p, alpha, beta, d)?;
    let k2 = regime_row(ExtendedP::Finite(2.0), alpha, beta, d)?.k;
    Ok((row, k2))
}

fn ratio(row: &RegimeRow, k2: f64, s: f64) -> Result<f64> {
    Ok(k2 / row.k * row.excess(s)? / (s * s))
}

/// The block with entry s: k = round(K_p √d / f_p(s)), clamped to [1, d].
pub fn block_direction(p: ExtendedP, d: usize, s: f64, alpha: f64, beta: f64) -> Result<Block> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("block entry must be positive, got {s}")));
    }
    let (row, k2) = block_rows(p, alpha, beta, d)?;
    let k = (row.k * (d as f64).sqrt() / row.excess(s)?).round().clamp(1.0, d as f64) as usize;
    Ok(Block { d, k, s, predicted_are: ratio(&row, k2, s)? })
}

/// The block whose predicted ARE equals `target`, which must lie strictly
/// between a_p (s → 0) and the s → ∞ limit (0 for p < 2, ∞ for p > 2).
pub fn block_for_target(p: ExtendedP, d: usize, target: f64, alpha: f64, beta: f64) -> Result<Block> {
    let (row, k2) = block_rows(p, alpha, beta, d)?;
    if p == ExtendedP::Finite(2.0) {
        return Err(Error::domain("every direction has ARE 1 at p = 2"));
    }
    let ap = super::ap::a_p(p);
    let below = p.value() < 2.0;
    let inside = if below { target > 0.0 && target < ap } else { target > ap && target.is_finite() };
    if !inside {
        return Err(Error::domain(format!("target {target} is outside the attainable open range next to a_p = {ap}")));
    }
    let mut err = None;
    let mut g = |ls: f64| match ratio(&row, k2, ls.exp()) {
        Ok(r) => r.ln() - target.ln(),
        Err(e) => {
            err.get_or_insert(e);
            0.0
        }
    };
    // the ratio is monotone in s: decreasing for p < 2, increasing for p > 2
    let (mut lo, mut hi) = (-2.0, 2.0);
    while (g(lo) > 0.0) != below && lo > -40.0 {
        lo -= 2.0;
    }
    while (g(hi) < 0.0) != below && hi < 40.0 {
        hi += 2.0;
    }
    let ls = find_root(&mut g, lo, hi, ROOT_TOL)?;
    if let Some(e) = err {
        return Err(e);
    }
    block_direction(p, d, ls.exp(), alpha, beta)
}
