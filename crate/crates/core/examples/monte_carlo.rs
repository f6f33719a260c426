//! Empirical size and power, and the KS distance to the null limit laws.

use pmean::mc::{empirical_critval, empirical_power, ks_null_limit};
use pmean::num::RngStream;
use pmean::ptest::{critical_value, sample_size, CritMethod, TestPlan};
use pmean::ExtendedP;

fn main() -> pmean::Result<()> {
    let d = 1_000;
    let reps = 20_000;
    for p in ["-2", "0", "1", "inf"] {
        let p: ExtendedP = p.parse()?;
        let c_mc = empirical_critval(p, d, 0.05, reps, &RngStream::new(1, 0))?;
        let c_as = critical_value(p, d, 0.05, CritMethod::Asymptotic)?.value;
        let size = empirical_power(p, d, &[], c_as, reps, &RngStream::new(1, 1))?;
        let plan = TestPlan::with_direction(p, 0.05, 0.95, vec![1.0; d])?;
        let n = sample_size(&plan)?.n as f64;
        let shift: Vec<f64> = plan.theta().iter().map(|x| x * n.sqrt()).collect();
        let power = empirical_power(p, d, &shift, c_mc.estimate, reps, &RngStream::new(1, 2))?;
        let ks = ks_null_limit(p, d, 5_000, &RngStream::new(1, 3))?;
        println!(
            "p = {:>4}: size at asymptotic c {:.4} ± {:.4}, power at n = {n} {:.4} ± {:.4}, KS to {} {:.4}",
            p.to_string(),
            size.estimate,
            size.half_width,
            power.estimate,
            power.half_width,
            ks.law,
            ks.ks
        );
    }
    Ok(())
}
