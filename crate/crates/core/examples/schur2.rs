//! Paired Monte Carlo check of the Schur²-ordering of rejection probabilities.

use pmean::are::finite::critical_value_exact;
use pmean::mc::schur2_check;
use pmean::num::{Quadrature, RngStream};
use pmean::ExtendedP;

fn main() -> pmean::Result<()> {
    // v² majorizes w²: same Euclidean norm, w more spread out
    let v = [2.0, 0.5];
    let w = [((4.0 + 0.25) / 2.0f64).sqrt(); 2];
    for p in ["0.5", "1", "2", "3", "inf"] {
        let p: ExtendedP = p.parse()?;
        let c = critical_value_exact(p, 2, 0.05, &Quadrature::default())?;
        let r = schur2_check(p, c, &v, &w, 200_000, &RngStream::new(9, 0))?;
        println!("p = {:>4}: P(v) = {:.4}, P(w) = {:.4}, diff {:+.5} ± {:.5} → {:?}", p.to_string(), r.power_v, r.power_w, r.diff, r.std_error, r.outcome);
    }
    Ok(())
}
