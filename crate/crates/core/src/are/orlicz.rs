//! The functional ‖v‖_{p,2} = inf{v > 0 : Σ g_p(v_j/v) ≤ K_p √d} for p ∈ (−1/2, 2).

use rayon::prelude::*;
use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::moments::ExtendedP;
use crate::num::{compensated_sum, find_root, ROOT_TOL};
use crate::regime::{regime_row, RegimeRow};

/// g_p of the Orlicz functional; on p ∈ (−1/2, 0) it is the row's f_p.
pub fn orlicz_g(row: &RegimeRow, s: f64) -> Result<f64> {
    let p = row.p.value();
    let s = s.abs();
    if p < 0.0 {
        row.excess(s)
    } else if p == 0.0 {
        Ok(if s <= E { (s / E).powi(2) } else { s.ln() })
    } else {
        Ok((s * s).min(s.powf(p)))
    }
}

// g_p(e^{ln_s}) without forming e^{ln_s}, which overflows for spikes at large d.
fn g_log(row: &RegimeRow, ln_s: f64) -> Result<f64> {
    let p = row.p.value();
    if p < 0.0 {
        return if ln_s > 300.0 { Ok(row.excess_sup()) } else { row.excess(ln_s.exp()) };
    }
    Ok(if p == 0.0 {
        if ln_s <= 1.0 {
            (2.0 * (ln_s - 1.0)).exp()
        } else {
            ln_s
        }
    } else if ln_s <= 0.0 {
        (2.0 * ln_s).exp()
    } else {
        (p * ln_s).exp()
    })
}

fn check_p(p: f64) -> Result<()> {
    if !(p > -0.5 && p < 2.0) {
        return Err(Error::domain(format!("‖·‖_{{p,2}} needs p in (−1/2, 2), got {p}")));
    }
    Ok(())
}

/// Distinct nonzero ln|v_j| with multiplicities.
fn distinct(v: &[f64]) -> Vec<(f64, f64)> {
    let mut abs: Vec<f64> = v.iter().filter(|&&x| x != 0.0).map(|x| x.abs().ln()).collect();
    abs.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for x in abs {
        match out.last_mut() {
            Some((y, m)) if *y == x => *m += 1.0,
            _ => out.push((x, 1.0)),
        }
    }
    out
}

/// ‖v‖_{p,2} for p ∈ (−1/2, 2) and 0 < α < β < 1.
pub fn orlicz_norm(p: f64, alpha: f64, beta: f64, v: &[f64]) -> Result<f64> {
    check_p(p)?;
    if v.is_empty() {
        return Err(Error::domain("empty vector"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("vector entries must be finite"));
    }
    let row = regime_row(ExtendedP::new(p), alpha, beta, v.len())?;
    orlicz_norm_with_row(&row, v)
}

/// As [`orlicz_norm`], reusing an already built row for (p, α, β, d).
pub fn orlicz_norm_with_row(row: &RegimeRow, v: &[f64]) -> Result<f64> {
    check_p(row.p.value())?;
    let target = row.k * (v.len() as f64).sqrt();
    let terms = distinct(v);
    let nonzero: f64 = terms.iter().map(|t| t.1).sum();
    if nonzero == 0.0 {
        return Ok(0.0);
    }
    // bounded g (p < 0): the constraint may hold for every v > 0
    let sup = row.excess_sup();
    if sup.is_finite() && nonzero * sup <= target {
        return Ok(0.0);
    }
    // h(ln v) = Σ g(v_j/v) − target is nonincreasing in v
    let h = |lv: f64| -> Result<f64> {
        let parts: Result<Vec<f64>> = if terms.len() > 64 {
            terms.par_iter().map(|&(lx, m)| g_log(row, lx - lv).map(|g| m * g)).collect()
        } else {
            terms.iter().map(|&(lx, m)| g_log(row, lx - lv).map(|g| m * g)).collect()
        };
        let parts = parts?;
        if parts.iter().any(|g| g.is_infinite()) {
            return Ok(f64::INFINITY);
        }
        Ok(compensated_sum(parts) - target)
    };
    let top = terms.last().expect("nonzero entries exist").0;
    let (mut lo, mut hi) = (top - 1.0, top + 1.0);
    let mut grow = 1.0;
    while h(lo)? <= 0.0 {
        lo -= grow;
        grow *= 2.0;
        if grow > 1e8 {
            return Err(Error::Bracket { lo, hi });
        }
    }
    grow = 1.0;
    while h(hi)? > 0.0 {
        hi += grow;
        grow *= 2.0;
        if grow > 1e8 {
            return Err(Error::Bracket { lo, hi });
        }
    }
    let mut err = None;
    let root = find_root(
        |lv| match h(lv) {
            Ok(y) => y,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        ROOT_TOL,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(root.exp()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::majorizes_squares;
    use crate::num::RngStream;

    const A: f64 = 0.05;
    const B: f64 = 0.95;

    #[test]
    fn equalized_grows_like_quarter_power() {
        for p in [-0.25, 0.0, 1.0] {
            let k = regime_row(ExtendedP::new(p), A, B, 100).unwrap().k;
            for d in [100usize, 10_000, 1_000_000] {
                let n = orlicz_norm(p, A, B, &vec![1.0; d]).unwrap();
                let r = n / (d as f64).powf(0.25);
                if p == 0.0 {
                    // d·(s/e)² = K√d on the quadratic branch: ratio 1/(e√K) ≈ 0.1925
                    assert!((r - 1.0 / (E * k.sqrt())).abs() < 1e-9, "d={d} ratio={r}");
                    assert!((0.15..=5.0).contains(&r));
                } else {
                    assert!((0.2..=5.0).contains(&r), "p={p} d={d} ratio={r}");
                }
            }
        }
        let r1 = orlicz_norm(1.0, A, B, &vec![1.0; 10_000]).unwrap() / 10.0;
        let k1 = regime_row(ExtendedP::new(1.0), A, B, 100).unwrap().k;
        assert!((r1 - 1.0 / k1.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn large_spikes_do_not_overflow() {
        let d = 10_000usize;
        let mut v = vec![0.0; d];
        v[0] = 100.0;
        let n = orlicz_norm(0.0, A, B, &v).unwrap();
        // ln(100/n) = K₀·100, so n ≈ e^{−360}
        let k0 = regime_row(ExtendedP::new(0.0), A, B, d).unwrap().k;
        let rel = (100f64.ln() - n.ln()) / (k0 * 100.0) - 1.0;
        assert!(rel.abs() < 1e-12, "{rel} {n}");
        // at d = 10⁶ the value e^{−3600} underflows to 0 without error
        let mut w = vec![0.0; 1_000_000];
        w[0] = 1000.0;
        assert_eq!(orlicz_norm(0.0, A, B, &w).unwrap(), 0.0);
    }

    #[test]
    fn spike_vanishes_for_negative_p() {
        for d in [100usize, 10_000] {
            let mut v = vec![0.0; d];
            v[0] = (d as f64).sqrt();
            assert_eq!(orlicz_norm(-0.25, A, B, &v).unwrap(), 0.0);
        }
    }

    #[test]
    fn spike_for_positive_p_solves_single_equation() {
        // g_p(√d/u) = K_p √d with one nonzero coordinate
        let d = 10_000usize;
        let mut v = vec![0.0; d];
        v[0] = (d as f64).sqrt();
        let row = regime_row(ExtendedP::new(1.0), A, B, d).unwrap();
        let n = orlicz_norm(1.0, A, B, &v).unwrap();
        let g = orlicz_g(&row, v[0] / n).unwrap();
        assert!((g / (row.k * 100.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn positive_homogeneous() {
        let mut rng = RngStream::new(5, 0);
        for p in [-0.25, 0.0, 1.0, 1.5] {
            for _ in 0..5 {
                let mut v = vec![0.0; 30];
                rng.fill_normal(&mut v);
                let a = orlicz_norm(p, A, B, &v).unwrap();
                let w: Vec<f64> = v.iter().map(|x| 2.0 * x).collect();
                let b = orlicz_norm(p, A, B, &w).unwrap();
                assert!((b - 2.0 * a).abs() <= 1e-10 * b.max(1.0), "p={p}: {a} {b}");
            }
        }
    }

    #[test]
    fn g_is_continuous_at_the_knots() {
        let row0 = regime_row(ExtendedP::new(0.0), A, B, 10).unwrap();
        assert!((orlicz_g(&row0, E * (1.0 - 1e-12)).unwrap() - 1.0).abs() < 1e-10);
        let row1 = regime_row(ExtendedP::new(1.0), A, B, 10).unwrap();
        assert_eq!(orlicz_g(&row1, 1.0).unwrap(), 1.0);
        assert_eq!(orlicz_g(&row1, 0.5).unwrap(), 0.25);
        assert_eq!(orlicz_g(&row1, 3.0).unwrap(), 3.0);
    }

    #[test]
    fn schur2_concave_on_random_pairs() {
        // w² ≺ v² via a T-transform of the squares: w² = λ v² + (1 − λ) P v²
        let mut rng = RngStream::new(11, 0);
        let mut checked = 0;
        while checked < 50 {
            let mut v = [0.0; 4];
            rng.fill_normal(&mut v);
            let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
            let (i, j) = ((rng.next_u64() % 4) as usize, (rng.next_u64() % 4) as usize);
            if i == j {
                continue;
            }
            let lam = rng.uniform_open();
            let mut wsq = sq.clone();
            wsq[i] = lam * sq[i] + (1.0 - lam) * sq[j];
            wsq[j] = lam * sq[j] + (1.0 - lam) * sq[i];
            let w: Vec<f64> = wsq.iter().map(|x| x.sqrt()).collect();
            assert!(majorizes_squares(&v, &w));
            for p in [-0.25, 0.0, 1.0] {
                let nv = orlicz_norm(p, A, B, &v).unwrap();
                let nw = orlicz_norm(p, A, B, &w).unwrap();
                assert!(nw >= nv * (1.0 - 1e-9), "p={p} v={v:?} w={w:?}: {nw} < {nv}");
            }
            checked += 1;
        }
    }

    #[test]
    fn rejects_out_of_range_p() {
        assert!(orlicz_norm(2.0, A, B, &[1.0]).is_err());
        assert!(orlicz_norm(-0.5, A, B, &[1.0]).is_err());
    }
}
