//! Exact relative efficiency at d = 2 by nested quadrature.

use pmean::are::are_finite;
use pmean::num::Quadrature;
use pmean::ExtendedP;

fn main() -> pmean::Result<()> {
    let q = Quadrature::default();
    let s2 = 2f64.sqrt();
    let cases: [(&str, [f64; 2]); 6] = [("1", [1.0, 1.0]), ("1", [s2, 0.0]), ("1.9", [1.0, 1.0]), ("2.1", [s2, 0.0]), ("3", [1.0, 1.0]), ("inf", [s2, 0.0])];
    for (p, u) in cases {
        let p: ExtendedP = p.parse()?;
        let r = are_finite(p, &u, 0.05, 0.95, &q)?;
        println!("p = {:>4}, u = ({:.4}, {:.4}): ARE = {:.6}  (c_p = {:.5}, t_p = {:.5}, t_2 = {:.5})", p.to_string(), u[0], u[1], r.are, r.c_p, r.t_p, r.t_2);
    }
    Ok(())
}
