//! Rows of the regime table: the shift function f_p, the rate κ_p(d) and the
//! constant K_{α,β;p}, plus the per-row asymptotic critical value and the
//! power obtained by solving the shift relation for β.
//!
//! For p = −∞ and p < −1 the row's f_p(s) = e^{−s²/2} equals 1 at s = 0 and
//! the relation Σ f_p(s_j) ∼ K d is approached from above. Everything that
//! needs an increasing function vanishing at 0 uses [`RegimeRow::excess`]
//! instead, which is 1 − e^{−s²/2} with target (1 − K) d on those rows and
//! coincides with f_p elsewhere.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::moments::{c_crit_inf, lambda_p, lambda_p0, log_moment, mu_tilde, neg_ln_inside, ExtendedP, Regime};
use crate::num::{normal_cdf, normal_pdf, normal_quantile};
use crate::stable::{b_p, StableLaw};

/// λ̃_2(0) = π²/8.
pub const LOG_VAR0: f64 = PI * PI / 8.0;

/// λ_{p,2}(0) = λ_{2p}(0) − λ_p(0)², for p > −1/2.
pub fn lambda_p2_0(p: f64) -> f64 {
    lambda_p0(2.0 * p) - lambda_p0(p).powi(2)
}

pub(crate) fn check_levels(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < beta && beta < 1.0) {
        return Err(Error::domain(format!("need 0 < α < β < 1, got α={alpha}, β={beta}")));
    }
    Ok(())
}

/// One evaluated row of the table for fixed (p, d, α, β).
#[derive(Debug, Clone, Serialize)]
pub struct RegimeRow {
    pub p: ExtendedP,
    pub regime: Regime,
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
    /// K_{α,β;p}.
    pub k: f64,
    /// κ_p(d).
    pub kappa: f64,
    /// b_p on the stable rows.
    pub b: Option<f64>,
    #[serde(skip)]
    law: Option<StableLaw>,
    /// α-quantile of the row's limit law: stable on the stable rows, Φ⁻¹(α) otherwise.
    q_alpha: f64,
    /// f-offset at zero: λ_p(0), μ̃_d(0), λ̃(0) or λ_{∞;d,α}(0).
    base: f64,
    /// Limit-law scale of the CLT rows: √λ_{p,2}(0), √(π²/8) or (2/π)^{1/4}.
    spread: f64,
    /// c_{d,α} on the p = ∞ row.
    c_inf: f64,
}

/// Builds the table row for p at dimension d.
pub fn regime_row(p: ExtendedP, alpha: f64, beta: f64, d: usize) -> Result<RegimeRow> {
    check_levels(alpha, beta)?;
    build(p, alpha, Some(beta), d)
}

/// A row without β: K is NaN, everything else (f, κ, critical value, power) is available.
pub fn null_row(p: ExtendedP, alpha: f64, d: usize) -> Result<RegimeRow> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("need 0 < α < 1, got {alpha}")));
    }
    build(p, alpha, None, d)
}

fn build(p: ExtendedP, alpha: f64, beta: Option<f64>, d: usize) -> Result<RegimeRow> {
    if d == 0 {
        return Err(Error::domain("dimension d must be ≥ 1"));
    }
    let df = d as f64;
    let regime = p.regime();
    let za = normal_quantile(alpha)?;
    let zb = match beta {
        Some(b) => normal_quantile(b)?,
        None => f64::NAN,
    };
    let mut row = RegimeRow {
        p,
        regime,
        d,
        alpha,
        beta: beta.unwrap_or(f64::NAN),
        k: f64::NAN,
        kappa: 1.0,
        b: None,
        law: None,
        q_alpha: za,
        base: 0.0,
        spread: 1.0,
        c_inf: f64::NAN,
    };
    match regime {
        Regime::NegInf => {
            row.kappa = df;
            row.k = row.beta.ln() / alpha.ln();
        }
        Regime::BelowNegOne | Regime::NegOne | Regime::NegOneToNegHalf => {
            let pv = p.value();
            let law = StableLaw::canonical(pv)?;
            let qa = law.quantile(alpha)?;
            let qb = match beta {
                Some(b) => law.quantile(b)?,
                None => f64::NAN,
            };
            row.b = Some(b_p(pv)?);
            row.law = Some(law);
            row.q_alpha = qa;
            match regime {
                Regime::BelowNegOne => {
                    row.kappa = df;
                    row.k = (qb / qa).powf(1.0 / pv);
                }
                Regime::NegOne => {
                    row.kappa = df;
                    row.k = qb - qa;
                    row.base = mu_tilde(d, 0.0)?;
                }
                _ => {
                    row.kappa = df.powf(-pv);
                    row.k = qb - qa;
                    row.base = lambda_p0(pv);
                }
            }
        }
        Regime::NegHalf => {
            row.kappa = if d > 1 { (df * df.ln()).sqrt() } else { f64::MIN_POSITIVE };
            row.spread = (2.0 / PI).powf(0.25);
            row.k = (zb - za) * row.spread;
            row.base = lambda_p0(-0.5);
        }
        Regime::NegHalfToZero | Regime::ZeroToInf => {
            let pv = p.value();
            row.kappa = df.sqrt();
            row.spread = lambda_p2_0(pv).sqrt();
            row.k = (zb - za) * row.spread;
            row.base = lambda_p0(pv);
        }
        Regime::Zero => {
            row.kappa = df.sqrt();
            row.spread = LOG_VAR0.sqrt();
            row.k = (zb - za) * row.spread;
            row.base = log_moment(1, 0.0)?;
        }
        Regime::PosInf => {
            row.c_inf = c_crit_inf(d, alpha)?;
            row.kappa = 1.0;
            row.k = (-alpha).ln_1p() - (-row.beta).ln_1p();
            row.base = neg_ln_inside(row.c_inf, 0.0);
        }
    }
    Ok(row)
}

impl RegimeRow {
    /// The stable limit law on the rows p < −1/2.
    pub fn law(&self) -> Option<&StableLaw> {
        self.law.as_ref()
    }

    /// The α-quantile of the row's limit law (standard normal on CLT rows).
    pub fn q_alpha(&self) -> f64 {
        self.q_alpha
    }

    /// f-offset at zero: λ_p(0), μ̃_d(0), λ̃(0) or λ_{∞;d,α}(0); 0 on the e^{−s²/2} rows.
    pub fn base(&self) -> f64 {
        self.base
    }

    /// Scale of the normal limit on the CLT rows; 1 elsewhere.
    pub fn spread(&self) -> f64 {
        self.spread
    }

    /// The table's f_p(s), verbatim.
    pub fn f(&self, s: f64) -> Result<f64> {
        match self.regime {
            Regime::NegInf | Regime::BelowNegOne => Ok((-0.5 * s * s).exp()),
            _ => self.excess(s),
        }
    }

    /// Centered, increasing form of f_p: zero at s = 0 on every row.
    pub fn excess(&self, s: f64) -> Result<f64> {
        let s = s.abs();
        if s == 0.0 {
            return Ok(0.0);
        }
        match self.regime {
            Regime::NegInf | Regime::BelowNegOne => Ok(-(-0.5 * s * s).exp_m1()),
            Regime::NegOne => Ok(self.base - mu_tilde(self.d, s)?),
            Regime::NegOneToNegHalf | Regime::NegHalf | Regime::NegHalfToZero => Ok(self.base - lambda_p(self.p.value(), s)?),
            Regime::Zero => Ok(log_moment(1, s)? - self.base),
            Regime::ZeroToInf => Ok(lambda_p(self.p.value(), s)? - self.base),
            Regime::PosInf => Ok(neg_ln_inside(self.c_inf, s) - self.base),
        }
    }

    /// sup_s excess(s): finite exactly on the rows p < 0.
    pub fn excess_sup(&self) -> f64 {
        match self.regime {
            Regime::NegInf | Regime::BelowNegOne => 1.0,
            Regime::NegOne | Regime::NegOneToNegHalf | Regime::NegHalf | Regime::NegHalfToZero => self.base,
            _ => f64::INFINITY,
        }
    }

    /// Right-hand side of the shift relation on the centered scale.
    pub fn target(&self) -> f64 {
        match self.regime {
            Regime::NegInf | Regime::BelowNegOne => (1.0 - self.k) * self.kappa,
            _ => self.k * self.kappa,
        }
    }

    /// Σ_j excess(s_j), evaluating each distinct |s_j| once.
    pub fn sum_excess(&self, s: &[f64]) -> Result<f64> {
        let mut abs: Vec<f64> = s.iter().map(|x| x.abs()).collect();
        abs.sort_by(|a, b| a.partial_cmp(b).expect("shift entries must not be NaN"));
        let mut terms = Vec::new();
        let mut i = 0;
        while i < abs.len() {
            let mut j = i + 1;
            while j < abs.len() && abs[j] == abs[i] {
                j += 1;
            }
            terms.push((j - i) as f64 * self.excess(abs[i])?);
            i = j;
        }
        Ok(crate::num::compensated_sum(terms))
    }

    /// Σ_j f_p(s_j) with the table's f.
    pub fn sum_f(&self, s: &[f64]) -> Result<f64> {
        let e = self.sum_excess(s)?;
        Ok(match self.regime {
            Regime::NegInf | Regime::BelowNegOne => s.len() as f64 - e,
            _ => e,
        })
    }

    /// (Σ excess(s_j) − target)/κ_p(d): zero on the shift relation, negative when underpowered.
    pub fn residual(&self, s: &[f64]) -> Result<f64> {
        Ok((self.sum_excess(s)? - self.target()) / self.kappa)
    }

    /// Asymptotic power given E = Σ_j excess(s_j) over all d coordinates.
    pub fn power_from_excess(&self, e: f64) -> Result<f64> {
        let df = self.d as f64;
        let a = self.alpha;
        let beta = match self.regime {
            Regime::NegInf => a.powf((df - e).max(0.0) / df),
            Regime::BelowNegOne => {
                let ratio = ((df - e) / df).max(0.0);
                if ratio == 0.0 {
                    1.0
                } else {
                    self.stable_cdf(self.q_alpha * ratio.powf(self.p.value()))?
                }
            }
            Regime::NegOne | Regime::NegOneToNegHalf => self.stable_cdf(self.q_alpha + e / self.kappa)?,
            Regime::NegHalf | Regime::NegHalfToZero | Regime::Zero | Regime::ZeroToInf => {
                normal_cdf(self.q_alpha + e / (self.kappa * self.spread))
            }
            Regime::PosInf => 1.0 - (1.0 - a) * (-e).exp(),
        };
        Ok(beta)
    }

    fn stable_cdf(&self, x: f64) -> Result<f64> {
        self.law.as_ref().expect("stable row carries its law").cdf(x)
    }

    /// Limit-law critical value in ⟨·⟩_p units, for the statistic ⟨Z⟩_p with Z ~ N(0, I_d).
    ///
    /// For p < 0 rejection ⟨x⟩_p > c is Σ|x_j|^p < d·c^p, so lower quantiles
    /// of the normalized sum map to upper critical values.
    pub fn critical_value(&self) -> Result<f64> {
        let df = self.d as f64;
        let a = self.alpha;
        let inner_pow = |base: f64, exp: f64| -> Result<f64> {
            if !(base > 0.0) {
                return Err(Error::domain(format!(
                    "asymptotic critical value undefined at d={}: base {base} ≤ 0 (dimension too small for α={a})",
                    self.d
                )));
            }
            Ok(base.powf(exp))
        };
        match self.regime {
            Regime::NegInf => Ok(-a.ln() / (2.0 * df * normal_pdf(0.0))),
            Regime::BelowNegOne => {
                let p = self.p.value();
                inner_pow(self.q_alpha * df.powf(-(p + 1.0)), 1.0 / p)
            }
            Regime::NegOne => inner_pow(self.base + self.q_alpha, -1.0),
            Regime::NegOneToNegHalf => {
                let p = self.p.value();
                inner_pow(self.base + self.q_alpha * df.powf(-p - 1.0), 1.0 / p)
            }
            Regime::NegHalf => inner_pow(self.base + self.spread * self.q_alpha * self.kappa / df, -2.0),
            Regime::NegHalfToZero => {
                let p = self.p.value();
                inner_pow(self.base + self.q_alpha * self.spread / df.sqrt(), 1.0 / p)
            }
            Regime::ZeroToInf => {
                let p = self.p.value();
                inner_pow(self.base - self.q_alpha * self.spread / df.sqrt(), 1.0 / p)
            }
            Regime::Zero => Ok((self.base - self.q_alpha * self.spread / df.sqrt()).exp()),
            Regime::PosInf => Ok(self.c_inf),
        }
    }
}
