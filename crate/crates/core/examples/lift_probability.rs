//! How often does a random polynomial have no liftable multiple root at
//! any prime up to y? Exhaustive counts for tiny moduli, then sampling.
//!
//! ```bash
//! cargo run --release --example lift_probability
//! ```

use nfs_sieve::experiments::{enumerate_exact, monte_carlo, RandomModel};

fn main() -> nfs_sieve::Result<()> {
    for (d, l) in [(2, 2), (2, 3), (3, 3), (2, 5)] {
        let e = enumerate_exact(d, l)?;
        println!(
            "d={d} l={l}: {}/{} polynomials mod {} have a liftable multiple root; per point {:?}",
            e.count_bad,
            e.count_total,
            l * l,
            e.per_point_counts
        );
    }

    println!();
    for d in 2..=5 {
        let model = RandomModel::new(d, 30, 1)?;
        let r = monte_carlo(&model, 2000)?;
        println!(
            "d={d} y=30: estimate {:.4} ± {:.4}  (product {:.4}, 6/pi^2 {:.4})",
            r.estimate, r.std_error, r.reference_product, r.inverse_zeta_2
        );
    }
    Ok(())
}
