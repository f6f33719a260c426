//! The totally skewed stable limit laws of the p < −1/2 rows.

use pmean::num::{normal_sf, RngStream};
use pmean::stable::StableLaw;

fn main() -> pmean::Result<()> {
    // p = −2 gives the standard Lévy law: F(x) = 2(1 − Φ(1/√x))
    let levy = StableLaw::canonical(-2.0)?;
    for x in [0.1f64, 0.5, 1.0, 2.0, 10.0, 100.0] {
        let closed = 2.0 * normal_sf(1.0 / x.sqrt());
        println!("x = {x:>6}: cdf {:.12}  closed form {:.12}  via cf {:.9}", levy.cdf(x)?, closed, levy.cdf_cf(x)?);
    }

    for p in [-3.0, -2.0, -1.0, -0.75] {
        let law = StableLaw::canonical(p)?;
        let (q05, q95) = (law.quantile(0.05)?, law.quantile(0.95)?);
        let mut rng = RngStream::new(7, 0);
        let xs = law.sample(100_000, &mut rng);
        let below = xs.iter().filter(|&&x| x <= q05).count() as f64 / xs.len() as f64;
        println!("p = {p:>5}: index {:.3}, q(0.05) = {q05:>10.5}, q(0.95) = {q95:>10.4}, sampled P(X ≤ q(0.05)) = {below:.4}", law.index());
    }
    Ok(())
}
