//! Relative efficiency against the 2-mean test: a_p, the d → ∞ classification,
//! and block directions with an intermediate efficiency.

use pmean::are::{a_p, block_for_target, classify_are, orlicz_norm, DirectionSequence};
use pmean::ExtendedP;

fn main() -> pmean::Result<()> {
    for p in [-0.25, 0.0, 0.5, 1.0, 2.0, 3.0, 6.0] {
        println!("a_{p} = {:.8}", a_p(ExtendedP::new(p)));
    }

    let probes = vec![100, 1_000, 10_000, 100_000];
    let families = [
        DirectionSequence::equalized(probes.clone())?,
        DirectionSequence::spike(probes.clone())?,
        DirectionSequence::normalized("sqrt-block", |d| (0..d).map(|j| if j * j < d { 1.0 } else { 0.0 }).collect(), probes)?,
    ];
    for p in ["-1", "0", "1", "2", "3", "inf"] {
        let p: ExtendedP = p.parse()?;
        for u in &families {
            match classify_are(p, u, 0.05, 0.95) {
                Ok(v) => println!("p = {:>4}, {:>10}: {:?} (line {})", p.to_string(), u.name(), v.value(), v.rationale().line),
                Err(e) => println!("p = {:>4}, {:>10}: {e}", p.to_string(), u.name()),
            }
        }
    }

    let d = 10_000;
    println!("‖1_d‖_(1,2) = {:.4} at d = {d}", orlicz_norm(1.0, 0.05, 0.95, &vec![1.0; d])?);
    for target in [0.2, 0.5, 0.8] {
        let b = block_for_target(ExtendedP::new(1.0), d, target, 0.05, 0.95)?;
        println!("p = 1, target {target}: block of k = {} entries s = {:.4}", b.k, b.s);
    }
    Ok(())
}
