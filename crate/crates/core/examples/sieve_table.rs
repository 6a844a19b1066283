//! Build the table for x^2 + 1 with m = 4, strip every prime up to 5, and
//! list the pairs whose entry is fully smooth.
//!
//! ```bash
//! cargo run --example sieve_table
//! ```

use nfs_sieve::engine::sieve_improved;
use nfs_sieve::{SievePolynomial, SieveTable};

fn main() -> nfs_sieve::Result<()> {
    let f = SievePolynomial::parse("1,0,1", 4)?;
    let (u, y) = (3, 5);

    let before = SieveTable::build(&f, u);
    println!("T(b, a) = (a - {}b) F(a, b), F = {:?}", f.m(), f.norm_form().coeffs());
    for b in 1..=u {
        let row: Vec<String> = (-(u as i64)..=u as i64).map(|a| before.entry(b, a).to_string()).collect();
        println!("  b={b}: {}", row.join(" "));
    }

    let after = sieve_improved(&f, u, y)?;
    println!("after removing primes <= {y}:");
    for (b, a, residual) in after.table.nonzero_entries() {
        let tag = if residual == 1.into() || residual == (-1).into() { "smooth" } else { "" };
        println!("  (a={a:>2}, b={b}) {:>6} -> {residual:>4} {tag}", before.entry(b, a));
    }
    println!("{} division attempts", after.ledger.grand_total());
    Ok(())
}
