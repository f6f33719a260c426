//! For p < 0 a direction with too many zero coordinates cannot reach power β.

use pmean::ptest::{feasibility, feasibility_threshold, Feasibility, TestPlan};
use pmean::regime::regime_row;
use pmean::ExtendedP;

fn main() -> pmean::Result<()> {
    let d = 10_000;
    for p in [-2.0, -1.0, -0.7, -0.5, -0.25] {
        let p = ExtendedP::new(p);
        let row = regime_row(p, 0.05, 0.95, d)?;
        let thr = feasibility_threshold(&row).expect("negative p has a threshold");
        print!("p = {:>5}: K = {:.6}, largest feasible d0 ≈ {thr:>9.1};", p.to_string(), row.k);
        for frac in [0.01, 0.5, 0.99] {
            let d0 = (frac * d as f64) as usize;
            let u: Vec<f64> = (0..d).map(|j| if j < d0 { 0.0 } else { 1.0 }).collect();
            let f = feasibility(&TestPlan::with_direction(p, 0.05, 0.95, u)?, 0.0)?;
            print!("  d0/d = {frac}: {}", if f == Feasibility::Feasible { "feasible" } else { "infeasible" });
        }
        println!();
    }
    Ok(())
}
