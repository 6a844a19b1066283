//! Roots of a cubic modulo small primes, and their lifts to prime powers.
//!
//! ```bash
//! cargo run --example hensel_ladders
//! ```

use nfs_sieve::roots::{build_lift_tables, classify_roots};
use nfs_sieve::SievePolynomial;

fn main() -> nfs_sieve::Result<()> {
    // x^3 + 2x^2 + x + 1
    let f = SievePolynomial::parse("1,1,2,1", 3)?;
    let (u, y) = (20, 13);

    for l in [2, 3, 5, 7, 11, 13] {
        let roots = classify_roots(f.poly(), l);
        println!("mod {l:>2}: simple {:?} multiple {:?}", roots.simple, roots.multiple);
    }

    let tables = build_lift_tables(&f, u, y)?;
    println!("\nladders for u = {u} (algebraic bound {}):", f.algebraic_bound(u));
    for ladder in &tables.ladders {
        if ladder.simple.first().is_some_and(|s| !s.is_empty()) {
            for (e, level) in ladder.simple.iter().enumerate() {
                println!("  {}^{}: {:?}", ladder.prime, e + 1, level);
            }
        }
        if !ladder.multiple.is_empty() {
            println!("  {}: multiple {:?}, liftable {:?}", ladder.prime, ladder.multiple, ladder.liftable);
        }
    }
    println!("\nprecompute: {:?}", tables.stats);
    Ok(())
}
