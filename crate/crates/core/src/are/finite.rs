//! Exact ARE at small d under the continuous-n Gaussian model: X̄√n = Z + t·u,
//! so the p-test needs shift t_p and the ARE is t₂²/t_p².

use serde::Serialize;
use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::moments::ExtendedP;
use crate::num::quad::{integrate_with_breaks, GAUSS_RADIUS};
use crate::num::{find_root, normal_cdf, normal_sf, Quadrature, ROOT_TOL};
use crate::ptest::pmean;

/// Largest dimension handled by nested quadrature.
pub const MAX_FINITE_D: usize = 3;

#[derive(Debug, Clone, Copy)]
enum Stat {
    /// Σ|x_j|^p, p ≠ 0 finite.
    Pow(f64),
    /// Σ ln|x_j|.
    Log,
    Max,
    Min,
}

impl Stat {
    fn of(p: ExtendedP) -> Self {
        match p {
            ExtendedP::NegInf => Stat::Min,
            ExtendedP::PosInf => Stat::Max,
            ExtendedP::Finite(0.0) => Stat::Log,
            ExtendedP::Finite(p) => Stat::Pow(p),
        }
    }

    fn g(self, x: f64) -> f64 {
        match self {
            Stat::Pow(p) => x.abs().powf(p),
            Stat::Log => x.abs().ln(),
            _ => unreachable!("max/min statistics are not additive"),
        }
    }

    /// The threshold on Σ g(x_j) equivalent to ⟨x⟩_p = c.
    fn sum_threshold(self, c: f64, d: usize) -> f64 {
        match self {
            Stat::Pow(p) => d as f64 * c.powf(p),
            Stat::Log => d as f64 * c.ln(),
            _ => c,
        }
    }
}

/// P(|Z + v| < h).
fn inside(h: f64, v: f64) -> f64 {
    if !(h > 0.0) {
        return 0.0;
    }
    let (lo, hi) = (-h - v, h - v);
    // use upper tails when both ends are on the right so nothing cancels
    if lo > 0.0 {
        normal_sf(lo) - normal_sf(hi)
    } else {
        normal_cdf(hi) - normal_cdf(lo)
    }
}

/// The radius h with {g(x) < b} = {|x| < h} (p ≥ 0) or {|x| > h} (p < 0).
fn radius(stat: Stat, b: f64) -> f64 {
    match stat {
        Stat::Pow(p) => {
            if b > 0.0 {
                b.powf(1.0 / p)
            } else {
                0.0
            }
        }
        Stat::Log => b.exp(),
        _ => unreachable!(),
    }
}

/// P(Σ_j g(Z_j + v_j) < b), by nesting one-dimensional integrals.
fn below(stat: Stat, b: f64, v: &[f64], quad: &Quadrature) -> Result<f64> {
    let neg = matches!(stat, Stat::Pow(p) if p < 0.0);
    if neg && !(b > 0.0) {
        return Ok(0.0);
    }
    let h = radius(stat, b);
    if v.len() == 1 {
        return Ok(if neg { 1.0 - inside(h, v[0]) } else { inside(h, v[0]) });
    }
    let (v0, rest) = (v[0], &v[1..]);
    let (lo, hi) = (v0 - GAUSS_RADIUS, v0 + GAUSS_RADIUS);
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |x: f64| {
        let dens = crate::num::normal_pdf(x - v0);
        if dens == 0.0 || err.borrow().is_some() {
            return 0.0;
        }
        match below(stat, b - stat.g(x), rest, quad) {
            Ok(f) => dens * f,
            Err(e) => {
                *err.borrow_mut() = Some(e);
                0.0
            }
        }
    };
    // the integrand has kinks at ±h (edge of the feasible set) and at 0 (|x|^p, ln|x|)
    let q = quad.clone().with_splits(&[-h, 0.0, h]);
    let pieces: Vec<(f64, f64)> = match stat {
        Stat::Pow(p) if p > 0.0 => vec![(lo.max(-h), hi.min(h))],
        Stat::Pow(_) => vec![(lo, hi.min(-h)), (lo.max(h), hi)],
        _ => vec![(lo, hi)],
    };
    let mut total = 0.0;
    for (a, c) in pieces {
        if c > a {
            total += integrate_with_breaks(integrand, a, c, &q, &[v0])?.value;
        }
    }
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(total.clamp(0.0, 1.0))
}

/// P(⟨Z + v⟩_p > c) for Z standard normal in R^d, d = v.len() ≤ 3.
pub fn reject_prob(p: ExtendedP, c: f64, v: &[f64], quad: &Quadrature) -> Result<f64> {
    if v.is_empty() || v.len() > MAX_FINITE_D {
        return Err(Error::domain(format!("finite-d quadrature needs 1 ≤ d ≤ {MAX_FINITE_D}, got {}", v.len())));
    }
    if !(c > 0.0) {
        return Ok(1.0);
    }
    let stat = Stat::of(p);
    Ok(match stat {
        Stat::Max => 1.0 - v.iter().map(|&s| inside(c, s)).product::<f64>(),
        Stat::Min => v.iter().map(|&s| 1.0 - inside(c, s)).product(),
        Stat::Pow(q) if q < 0.0 => below(stat, stat.sum_threshold(c, v.len()), v, quad)?,
        _ => 1.0 - below(stat, stat.sum_threshold(c, v.len()), v, quad)?,
    })
}

// Root of a monotone function that may fail; the first error wins.
fn solve<G: FnMut(f64) -> Result<f64>>(mut g: G, lo: f64, hi: f64) -> Result<f64> {
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let root = find_root(
        |x| match g(x) {
            Ok(y) => y,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        ROOT_TOL,
    );
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    root
}

/// Critical value c with P(⟨Z⟩_p > c) = α in dimension d ≤ 3.
pub fn critical_value_exact(p: ExtendedP, d: usize, alpha: f64, quad: &Quadrature) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("need 0 < α < 1, got {alpha}")));
    }
    let zero = vec![0.0; d];
    let g = |lc: f64| reject_prob(p, lc.exp(), &zero, quad).map(|r| r - alpha);
    // bracket on ln c: rejection falls from 1 to 0 as c grows
    let (mut lo, mut hi) = (-1.0, 1.0);
    for _ in 0..12 {
        if g(lo)? > 0.0 {
            break;
        }
        lo *= 2.0;
    }
    for _ in 0..12 {
        if g(hi)? < 0.0 {
            break;
        }
        hi *= 2.0;
    }
    Ok(solve(g, lo, hi)?.exp())
}

/// Shift t along u (taken as given) with P(⟨Z + t u⟩_p > c) = β.
pub fn shift_for_power(p: ExtendedP, c: f64, u: &[f64], beta: f64, quad: &Quadrature) -> Result<f64> {
    let g = |t: f64| {
        let v: Vec<f64> = u.iter().map(|x| t * x).collect();
        reject_prob(p, c, &v, quad).map(|r| r - beta)
    };
    if g(0.0)? >= 0.0 {
        return Err(Error::domain("β does not exceed the size at zero shift"));
    }
    let mut hi = 1.0;
    while g(hi)? < 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Bracket { lo: 0.0, hi });
        }
    }
    solve(g, 0.0, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteAre {
    pub are: f64,
    /// Critical value of the p-test.
    pub c_p: f64,
    /// Shift along the ⟨·⟩₂-unit direction reaching power β for the p-test.
    pub t_p: f64,
    pub c_2: f64,
    pub t_2: f64,
}

/// ARE_{p,2,u} at fixed d ≤ 3: t₂²/t_p², with t measured along u/⟨u⟩₂.
pub fn are_finite(p: ExtendedP, u: &[f64], alpha: f64, beta: f64, quad: &Quadrature) -> Result<FiniteAre> {
    crate::regime::check_levels(alpha, beta)?;
    let d = u.len();
    if d == 0 || d > MAX_FINITE_D {
        return Err(Error::domain(format!("are_finite needs 1 ≤ d ≤ {MAX_FINITE_D}, got {d}")));
    }
    let n2 = pmean(ExtendedP::Finite(2.0), u);
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(Error::domain("direction must be nonzero and finite"));
    }
    let unit: Vec<f64> = u.iter().map(|x| x / n2).collect();
    let two = ExtendedP::Finite(2.0);
    let c_2 = critical_value_exact(two, d, alpha, quad)?;
    let t_2 = shift_for_power(two, c_2, &unit, beta, quad)?;
    let (c_p, t_p) = if p == two {
        (c_2, t_2)
    } else {
        let c = critical_value_exact(p, d, alpha, quad)?;
        (c, shift_for_power(p, c, &unit, beta, quad)?)
    };
    Ok(FiniteAre { are: (t_2 / t_p).powi(2), c_p, t_p, c_2, t_2 })
}
