//! Run the trivial, classical and improved sieves on one random instance
//! and compare division attempts prime by prime.
//!
//! ```bash
//! cargo run --release --example compare_sieves -- 3 20 200 50 7
//! ```

use nfs_sieve::arith::primes_up_to;
use nfs_sieve::experiments::{compare, random_sieve_polynomial};

fn main() -> nfs_sieve::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let [d, m, u, y, seed] = match args.as_slice() {
        [d, m, u, y, seed] => [*d, *m, *u, *y, *seed],
        _ => [3, 20, 200, 50, 7],
    };

    let f = random_sieve_polynomial(d as usize, m, seed)?;
    let run = compare(&f, u, y)?;
    println!("f = {}  (m = {m}, u = {u}, y = {y})", f.poly());
    println!("{:>4} {:>10} {:>10} {:>10}", "l", "trivial", "classical", "improved");
    for l in primes_up_to(y)?.iter() {
        println!(
            "{l:>4} {:>10} {:>10} {:>10}",
            run.trivial.ledger.prime_total(l),
            run.classical.ledger.prime_total(l),
            run.improved.ledger.prime_total(l)
        );
    }
    println!(
        "total {:>9} {:>10} {:>10}",
        run.trivial.ledger.grand_total(),
        run.classical.ledger.grand_total(),
        run.improved.ledger.grand_total()
    );
    println!(
        "ratio improved/classical = {:.4}, tables identical: {}, residuals coprime: {}",
        run.report.ratio_f64().unwrap_or(0.0),
        run.tables_identical(),
        run.residuals_coprime()
    );
    Ok(())
}
