//! Asymptotic critical values against Monte Carlo ones.

use pmean::ptest::{critical_value, CritMethod};
use pmean::ExtendedP;

fn main() -> pmean::Result<()> {
    let (d, alpha) = (500, 0.05);
    let mc = CritMethod::MonteCarlo { reps: 20_000, seed: 3 };
    println!("d = {d}, α = {alpha}");
    for p in ["-inf", "-2", "-0.5", "0", "1", "2", "3", "inf"] {
        let p: ExtendedP = p.parse()?;
        let a = critical_value(p, d, alpha, CritMethod::Asymptotic)?;
        let m = critical_value(p, d, alpha, mc)?;
        println!("p = {:>5}: asymptotic {:>12.6}  Monte Carlo {:>12.6} ± {:.6}", p.to_string(), a.value, m.value, m.half_width);
    }
    Ok(())
}
