//! The inequality r(p) > 1 + p²/2 behind a_p < 1, with its rational lower bounds.

use pmean::are::ap::{ap_bound_point, grid};
use pmean::are::verify_ap_bound;

fn main() {
    let g = grid(-0.499, 50.0, 1e-3);
    let report = verify_ap_bound(&g);
    println!("{} grid points, {} violations, {} points where no rational bound suffices", report.checked, report.violations.len(), report.bound_failures.len());
    if let Some(m) = report.min_margin {
        println!("smallest relative margin at p = {:.3}: r − (1 + p²/2) = {:.3e}", m.p, m.margin);
    }
    for p in [-0.4, 0.5, 1.9, 2.1, 10.0] {
        let pt = ap_bound_point(p);
        println!("p = {p:>5}: margin {:.6e}, best bound margin {:.6e}", pt.margin, pt.bound_margin);
    }
}
