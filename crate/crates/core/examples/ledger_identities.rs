//! Predict every division attempt from brute-force set sizes and check the
//! ledgers against the prediction. (x + 1)^2 has a double root at 2 mod 3
//! that lifts mod 9, so the improved sieve pays a visible correction.
//!
//! ```bash
//! cargo run --example ledger_identities
//! ```

use nfs_sieve::engine::{sieve_classical, sieve_improved};
use nfs_sieve::oracle::verify_ledgers;
use nfs_sieve::SievePolynomial;

fn main() -> nfs_sieve::Result<()> {
    let f = SievePolynomial::parse("1,2,1", 2)?;
    let (u, y) = (12, 7);
    let classical = sieve_classical(&f, u, y)?;
    let improved = sieve_improved(&f, u, y)?;
    let report = verify_ledgers(&classical, &improved, &f, u, y)?;

    println!("{:>3} {:>3} {:>6} {:>6} {:>6} {:>6} {:>5}  C_asym   D_asym", "b", "l", "alg2", "C", "alg3", "D", "corr");
    for cell in report.cells.iter().filter(|c| c.b <= 3) {
        println!(
            "{:>3} {:>3} {:>6} {:>6} {:>6} {:>6} {:>5}  {:>7.3}  {:>7.3}",
            cell.b,
            cell.l,
            cell.classical.total(),
            cell.exact.c_exact,
            cell.improved.total(),
            cell.exact.d_exact,
            cell.exact.correction,
            num_traits::ToPrimitive::to_f64(&cell.asymptotic.c_asym).unwrap(),
            num_traits::ToPrimitive::to_f64(&cell.asymptotic.d_asym).unwrap(),
        );
    }
    println!("...");
    println!(
        "{} cells, identities hold: {}, totals {:?}",
        report.cells.len(),
        report.identities_hold(),
        report.totals
    );
    Ok(())
}
