//! p-mean tests of H₀: θ = 0 for the mean of N(θ, I_d) in high dimension.
//!
//! The test rejects when √n ⟨X̄_n⟩_p exceeds a critical value, where ⟨s⟩_p is the
//! power mean of |s_j| (min, geometric mean and max at p = −∞, 0, ∞). The crate
//! provides critical values, power, sample sizes and feasibility for every p,
//! the stable limit laws of the p < −1/2 rows, relative efficiencies against the
//! 2-mean test, and a Monte Carlo harness for checking all of it.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod are;
pub mod cli;
pub mod error;
pub mod mc;
pub mod moments;
pub mod num;
pub mod ptest;
pub mod regime;
pub mod stable;

pub use error::{Error, Result};
pub use moments::{ExtendedP, Regime};
