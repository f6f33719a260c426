//! Bracketed root finding (Brent's method with a bisection safeguard).

use crate::error::{Error, Result};

/// Default absolute tolerance on the argument.
pub const ROOT_TOL: f64 = 1e-12;

/// Root of `g` on `[lo, hi]`, which must bracket a sign change.
///
/// Stops when the bracket is narrower than `tol` (plus a few ulps of the
/// iterate) or `g` is exactly zero.
pub fn find_root<G: FnMut(f64) -> f64>(mut g: G, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (g(a), g(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::domain("root finder: function is NaN at the bracket ends"));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b);
        if fb.is_nan() {
            return Err(Error::domain("root finder: function returned NaN"));
        }
    }
    Ok(b)
}

/// Grows `hi` geometrically from `start` until `g(hi)` changes sign relative to `g(lo)`.
pub fn expand_upper<G: FnMut(f64) -> f64>(mut g: G, lo: f64, start: f64, factor: f64, max_hi: f64) -> Result<f64> {
    let sign_lo = g(lo).signum();
    let mut hi = start;
    while hi <= max_hi {
        let v = g(hi);
        if v == 0.0 || v.signum() != sign_lo {
            return Ok(hi);
        }
        hi *= factor;
    }
    Err(Error::Bracket { lo, hi: max_hi })
}
