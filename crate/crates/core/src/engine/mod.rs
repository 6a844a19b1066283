//! The three line sieves, each charging every test-and-divide on a table
//! entry to a [`CostLedger`].
//!
//! Cost unit: one fused test-and-divide. A while-loop that removes `k`
//! factors costs `k + 1` (the last test fails); an unconditional division
//! costs 1. Zero entries are skipped and never charged. Rows are sieved in
//! parallel, each with a private ledger; ledgers merge by addition, so the
//! result does not depend on scheduling.
//!
//! Within a row the order is: primes ascending, exponents ascending, then
//! `a` ascending along each progression.

mod ledger;
mod table;

use rayon::prelude::*;
use serde::Serialize;

pub use ledger::{Attempts, CostLedger, Phase};
pub use table::SieveTable;

use crate::arith::{self, mul_mod, primes_up_to};
use crate::error::{Error, Result};
use crate::poly::SievePolynomial;
use crate::roots::{build_lift_tables, classify_roots, LiftTables, PrecomputeStats, RootClassification};
use table::Cell;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Algorithm {
    /// Try every prime on every entry.
    Trivial,
    /// Sieve the progressions of `bm` and of `b` times each root of `f mod l`,
    /// dividing with while-loops.
    Classical,
    /// Three phases over exponent ladders with unconditional divisions; only
    /// liftable multiple roots fall back to a while-loop.
    Improved,
}

impl Algorithm {
    pub fn id(self) -> u8 {
        match self {
            Algorithm::Trivial => 1,
            Algorithm::Classical => 2,
            Algorithm::Improved => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SieveOutcome {
    pub algorithm: Algorithm,
    pub bound: u64,
    pub table: SieveTable,
    pub ledger: CostLedger,
    pub precompute: PrecomputeStats,
}

/// Per-prime data for the classical sieve: `m mod l` and every root of
/// `f mod l`.
#[derive(Clone, Debug)]
pub struct ClassicalTables {
    pub primes: Vec<(u64, u64, RootClassification)>,
    pub stats: PrecomputeStats,
}

pub fn classical_tables(f: &SievePolynomial, y: u64) -> Result<ClassicalTables> {
    let primes = primes_up_to(y)?;
    let mut stats = PrecomputeStats::default();
    let primes = primes
        .iter()
        .map(|l| {
            stats.root_scan_evaluations += l;
            stats.rational_residues += 1;
            (l, f.m() % l, classify_roots(f.poly(), l))
        })
        .collect();
    Ok(ClassicalTables { primes, stats })
}

pub fn sieve_trivial(f: &SievePolynomial, u: u64, y: u64) -> Result<SieveOutcome> {
    let primes = primes_up_to(y)?;
    let mut table = SieveTable::build(f, u);
    let ledger = trivial_pass(&mut table, primes.as_slice());
    Ok(SieveOutcome {
        algorithm: Algorithm::Trivial,
        bound: y,
        table,
        ledger,
        precompute: PrecomputeStats::default(),
    })
}

pub fn sieve_classical(f: &SievePolynomial, u: u64, y: u64) -> Result<SieveOutcome> {
    let tables = classical_tables(f, y)?;
    let mut table = SieveTable::build(f, u);
    let ledger = classical_pass(&mut table, &tables);
    Ok(SieveOutcome {
        algorithm: Algorithm::Classical,
        bound: y,
        table,
        ledger,
        precompute: tables.stats,
    })
}

pub fn sieve_improved(f: &SievePolynomial, u: u64, y: u64) -> Result<SieveOutcome> {
    let lift = build_lift_tables(f, u, y)?;
    let mut table = SieveTable::build(f, u);
    let ledger = improved_pass(&mut table, &lift)?;
    Ok(SieveOutcome {
        algorithm: Algorithm::Improved,
        bound: y,
        table,
        ledger,
        precompute: lift.stats,
    })
}

pub fn run(algorithm: Algorithm, f: &SievePolynomial, u: u64, y: u64) -> Result<SieveOutcome> {
    match algorithm {
        Algorithm::Trivial => sieve_trivial(f, u, y),
        Algorithm::Classical => sieve_classical(f, u, y),
        Algorithm::Improved => sieve_improved(f, u, y),
    }
}

/// Column indices of `a` in `[-u, u]` with `a ≡ residue (mod modulus)`.
fn progression(residue: u128, modulus: u128, u: u64) -> impl Iterator<Item = usize> {
    let last = 2 * u as u128;
    let offset = (residue % modulus + u as u128) % modulus;
    let step = modulus.min(last + 1) as usize;
    (offset..=last).step_by(step).map(|c| c as usize)
}

/// While-loop division; returns the number of tests performed.
fn divide_out(cell: &mut Cell, l: u64) -> u64 {
    let mut tests = 1;
    while cell.try_divide(l) {
        tests += 1;
    }
    tests
}

/// While-loop division along a progression, skipping zero entries.
fn divide_along(row: &mut [Cell], start: u128, modulus: u128, u: u64, l: u64) -> u64 {
    let mut tests = 0;
    for col in progression(start, modulus, u) {
        if !row[col].is_zero() {
            tests += divide_out(&mut row[col], l);
        }
    }
    tests
}

fn sieve_rows<F>(table: &mut SieveTable, row_fn: F) -> Result<CostLedger>
where
    F: Fn(u64, &mut [Cell], &mut CostLedger) -> Result<()> + Sync,
{
    let ledgers = table
        .rows
        .par_iter_mut()
        .enumerate()
        .map(|(i, row)| {
            let mut ledger = CostLedger::new();
            row_fn(i as u64 + 1, row, &mut ledger)?;
            Ok(ledger)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = CostLedger::new();
    for ledger in ledgers {
        total += ledger;
    }
    Ok(total)
}

pub fn trivial_pass(table: &mut SieveTable, primes: &[u64]) -> CostLedger {
    sieve_rows(table, |b, row, ledger| {
        for &l in primes {
            ledger.touch(b, l);
            let tests: u64 = row
                .iter_mut()
                .filter(|c| !c.is_zero())
                .map(|c| divide_out(c, l))
                .sum();
            ledger.record(b, l, Phase::Trivial, tests);
        }
        Ok(())
    })
    .expect("the trivial sieve has no failure modes")
}

pub fn classical_pass(table: &mut SieveTable, tables: &ClassicalTables) -> CostLedger {
    let u = table.u();
    sieve_rows(table, |b, row, ledger| {
        for (l, epsilon, roots) in &tables.primes {
            let l = *l;
            if b % l == 0 {
                continue;
            }
            ledger.touch(b, l);
            let modulus = l as u128;
            let start = mul_mod(b as u128, *epsilon as u128, modulus);
            let tests = divide_along(row, start, modulus, u, l);
            ledger.record(b, l, Phase::Rational, tests);

            for root in roots.all() {
                let phase = if roots.is_multiple(root) {
                    Phase::AlgebraicMultiple
                } else {
                    Phase::AlgebraicSimple
                };
                let start = mul_mod(b as u128, root as u128, modulus);
                let tests = divide_along(row, start, modulus, u, l);
                ledger.record(b, l, phase, tests);
            }
        }
        Ok(())
    })
    .expect("the classical sieve has no failure modes")
}

pub fn improved_pass(table: &mut SieveTable, lift: &LiftTables) -> Result<CostLedger> {
    let u = table.u();
    if lift.u != u {
        return Err(Error::InvalidConfig(format!(
            "lift tables built for u = {} but the table has u = {u}",
            lift.u
        )));
    }
    sieve_rows(table, |b, row, ledger| {
        for ladder in &lift.ladders {
            let l = ladder.prime;
            if b % l == 0 {
                continue;
            }
            ledger.touch(b, l);

            let mut unconditional = |row: &mut [Cell], start: u128, modulus: u128, phase: Phase| {
                let mut count = 0;
                for col in progression(start, modulus, u) {
                    let cell = &mut row[col];
                    if cell.is_zero() {
                        continue;
                    }
                    if !cell.try_divide(l) {
                        return Err(Error::InvariantViolation {
                            phase: phase.name(),
                            b,
                            a: col as i64 - u as i64,
                            prime: l,
                        });
                    }
                    count += 1;
                }
                ledger.record(b, l, phase, count);
                Ok(())
            };

            for (e, epsilon) in (1..).zip(&ladder.rational) {
                let modulus = arith::checked_pow(l, e).expect("ladder modulus fits");
                let start = mul_mod(b as u128, *epsilon, modulus);
                unconditional(row, start, modulus, Phase::Rational)?;
            }

            for e in 1..=ladder.algebraic_cap() {
                let modulus = arith::checked_pow(l, e).expect("ladder modulus fits");
                for &x in ladder.simple_at(e) {
                    let start = mul_mod(b as u128, x, modulus);
                    unconditional(row, start, modulus, Phase::AlgebraicSimple)?;
                }
            }

            let modulus = l as u128;
            for &x in &ladder.multiple {
                let start = mul_mod(b as u128, x as u128, modulus);
                unconditional(row, start, modulus, Phase::AlgebraicMultiple)?;
            }
            for &x in &ladder.liftable {
                let start = mul_mod(b as u128, x as u128, modulus);
                let tests = divide_along(row, start, modulus, u, l);
                ledger.record(b, l, Phase::AlgebraicMultiple, tests);
            }
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Zero;

    fn example() -> SievePolynomial {
        SievePolynomial::from_i64(&[1, 0, 1], 4).unwrap()
    }

    #[test]
    fn progressions_cover_the_window() {
        let cols: Vec<i64> = progression(4, 5, 3).map(|c| c as i64 - 3).collect();
        assert_eq!(cols, vec![-1]);
        let cols: Vec<i64> = progression(2, 5, 3).map(|c| c as i64 - 3).collect();
        assert_eq!(cols, vec![-3, 2]);
        let cols: Vec<i64> = progression(0, 2, 2).map(|c| c as i64 - 2).collect();
        assert_eq!(cols, vec![-2, 0, 2]);
        assert_eq!(progression(7, 25, 3).count(), 0);
        assert_eq!(progression(3, u128::MAX >> 8, 3).count(), 1);
    }

    #[test]
    fn single_entry_trivial_costs() {
        let mut t = SieveTable::from_rows(1, vec![vec![BigInt::zero(), BigInt::from(12), BigInt::zero()]]);
        let ledger = trivial_pass(&mut t, &[2, 3]);
        assert_eq!(ledger[(1, 2)].trivial, 3);
        assert_eq!(ledger[(1, 3)].trivial, 2);
        assert_eq!(t.entry(1, 0), BigInt::from(1));
    }

    #[test]
    fn all_zero_table_costs_nothing() {
        let mut t = SieveTable::from_rows(2, vec![vec![BigInt::zero(); 5]; 2]);
        assert_eq!(trivial_pass(&mut t, &[2, 3, 5]).grand_total(), 0);
    }

    #[test]
    fn worked_example_cells() {
        let f = example();
        let two = sieve_classical(&f, 3, 5).unwrap();
        let c = two.ledger[(1, 5)];
        assert_eq!(c.rational, 2);
        assert_eq!(c.algebraic(), 8);
        assert_eq!(c.total(), 10);

        let three = sieve_improved(&f, 3, 5).unwrap();
        let d = three.ledger[(1, 5)];
        assert_eq!(d.rational, 1);
        assert_eq!(d.algebraic_simple, 4);
        assert_eq!(d.algebraic_multiple, 0);
        assert_eq!(d.total(), 5);

        let one = sieve_trivial(&f, 3, 5).unwrap();
        assert_eq!(one.table, two.table);
        assert_eq!(two.table, three.table);
    }

    #[test]
    fn rows_divisible_by_l_are_skipped() {
        let f = example();
        let two = sieve_classical(&f, 6, 7).unwrap();
        let three = sieve_improved(&f, 6, 7).unwrap();
        for b in 1..=6u64 {
            for l in [2u64, 3, 5, 7] {
                if b % l == 0 {
                    assert_eq!(two.ledger[(b, l)].total(), 0);
                    assert_eq!(three.ledger[(b, l)].total(), 0);
                }
            }
        }
    }

    #[test]
    fn pure_square_has_no_simple_phase() {
        let f = SievePolynomial::from_i64(&[0, 0, 1], 3).unwrap();
        let three = sieve_improved(&f, 20, 13).unwrap();
        assert_eq!(three.ledger.totals().algebraic_simple, 0);
        assert!(three.ledger.totals().algebraic_multiple > 0);
        let one = sieve_trivial(&f, 20, 13).unwrap();
        assert_eq!(one.table, three.table);
    }

    #[test]
    fn residuals_are_coprime() {
        let f = SievePolynomial::from_i64(&[-1, 2, 0, 1], 2).unwrap();
        let primes = primes_up_to(11).unwrap();
        for alg in [Algorithm::Trivial, Algorithm::Classical, Algorithm::Improved] {
            let out = run(alg, &f, 25, 11).unwrap();
            assert!(out.table.is_coprime_to(primes.as_slice()), "{alg:?}");
        }
    }

    #[test]
    fn ledgers_are_deterministic() {
        let f = SievePolynomial::from_i64(&[3, -2, 1, 1], 5).unwrap();
        let a = sieve_improved(&f, 40, 17).unwrap();
        let b = sieve_improved(&f, 40, 17).unwrap();
        assert_eq!(a.ledger, b.ledger);
        assert_eq!(a.table, b.table);
    }

    #[test]
    fn mismatched_lift_tables_are_rejected() {
        let f = example();
        let lift = build_lift_tables(&f, 4, 5).unwrap();
        let mut table = SieveTable::build(&f, 3);
        assert!(matches!(improved_pass(&mut table, &lift), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn unconditional_division_on_a_miss_is_an_error() {
        // Tamper with the rational ladder so the first progression misses.
        let f = example();
        let mut lift = build_lift_tables(&f, 3, 5).unwrap();
        let mut table = SieveTable::build(&f, 3);
        lift.ladders[2].rational[0] = 1;
        let err = improved_pass(&mut table, &lift).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation { prime: 5, phase: "rational", .. }));
    }
}
