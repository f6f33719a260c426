//! Sample sizes and asymptotic power along equalized and spiked directions.

use pmean::ptest::{power_asymptotic, sample_size, ShiftVector, TestPlan};
use pmean::{Error, ExtendedP};

fn main() -> pmean::Result<()> {
    let d = 10_000;
    let equalized = vec![1.0; d];
    let mut spike = vec![0.0; d];
    spike[0] = 1.0;
    println!("d = {d}, α = 0.05, β = 0.95; θ rescaled to unit Euclidean norm");
    for p in ["-inf", "-2", "-1", "-0.5", "0", "1", "2", "3", "inf"] {
        let p: ExtendedP = p.parse()?;
        let mut line = format!("p = {:>5}:", p.to_string());
        for (name, u) in [("equalized", &equalized), ("spike", &spike)] {
            let plan = TestPlan::with_direction(p, 0.05, 0.95, u.clone())?;
            match sample_size(&plan) {
                Ok(s) => line += &format!("  {name} n = {:>10} (power {:.4})", s.n, s.power),
                Err(Error::Infeasible { threshold, d0 }) => line += &format!("  {name} infeasible (d0 = {d0} > {threshold:.1})"),
                Err(Error::Domain(msg)) => line += &format!("  {name}: {msg}"),
                Err(e) => return Err(e),
            }
        }
        println!("{line}");
    }

    // power curve of the 1-mean test along 1_d/√d
    let unit: Vec<f64> = equalized.iter().map(|x| x / (d as f64).sqrt()).collect();
    for n in [50.0, 100.0, 150.0, 200.0] {
        let shift = ShiftVector::new(unit.iter().map(|x| x * f64::sqrt(n)).collect())?;
        println!("p = 1, n = {n:>4}: power {:.4}", power_asymptotic(ExtendedP::new(1.0), d, 0.05, &shift)?);
    }
    Ok(())
}
