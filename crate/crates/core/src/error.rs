use thiserror::Error;

/// Every failure the library reports. The CLI maps each variant to an exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change on bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("accuracy target missed: estimate {estimate} with error bound {bound}")]
    Accuracy { estimate: f64, bound: f64 },

    #[error("infeasible direction: d0 = {d0} exceeds threshold {threshold:.6}")]
    Infeasible { threshold: f64, d0: usize },

    #[error("indeterminate growth: slope {slope:.4} is within {band} of threshold {threshold:.4}")]
    Indeterminate { slope: f64, threshold: f64, band: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
