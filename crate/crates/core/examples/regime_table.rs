//! One row of the regime table per range of p: rate κ_p(d), constant K and
//! the asymptotic critical value.

use pmean::regime::regime_row;
use pmean::ExtendedP;

fn main() -> pmean::Result<()> {
    let d = 10_000;
    println!("d = {d}, α = 0.05, β = 0.95");
    println!("{:>6} {:>16} {:>14} {:>14} {:>14}", "p", "regime", "κ_p(d)", "K", "c");
    for p in ["-inf", "-2", "-1", "-0.7", "-0.5", "-0.25", "0", "1", "3", "inf"] {
        let p: ExtendedP = p.parse()?;
        let row = regime_row(p, 0.05, 0.95, d)?;
        println!("{:>6} {:>16} {:>14.6} {:>14.8} {:>14.8}", p.to_string(), format!("{:?}", row.regime), row.kappa, row.k, row.critical_value()?);
    }
    Ok(())
}
