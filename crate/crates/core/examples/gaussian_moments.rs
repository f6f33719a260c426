//! Moments of |Z + s|^p and ln|Z + s| for a standard normal Z.

use pmean::moments::{lambda_inf, lambda_p, lambda_p0, log_moment, mu_tilde, c_crit_inf};
use pmean::regime::{lambda_p2_0, LOG_VAR0};

fn main() -> pmean::Result<()> {
    println!("{:>6} {:>14} {:>14} {:>14}", "p", "λ_p(0)", "λ_p(1)", "Var |Z|^p");
    for p in [-0.4, -0.25, 0.5, 1.0, 2.0, 3.0] {
        println!("{p:>6} {:>14.10} {:>14.10} {:>14.10}", lambda_p0(p), lambda_p(p, 1.0)?, lambda_p2_0(p));
    }

    let var0 = log_moment(2, 0.0)?;
    println!("\nVar ln|Z| = {var0:.12}  (π²/8 = {LOG_VAR0:.12})");

    // the p = −1 and p = ∞ rows depend on d
    for d in [100usize, 10_000, 1_000_000] {
        let c = c_crit_inf(d, 0.05)?;
        println!("d = {d:>8}: μ̃_d(0) = {:.6}, c_(d,0.05) = {c:.6}, d·λ_∞(0) = {:.6}", mu_tilde(d, 0.0)?, d as f64 * lambda_inf(d, 0.05, 0.0)?);
    }
    Ok(())
}
