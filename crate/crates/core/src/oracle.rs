//! Brute-force set sizes and the cost predictions built from them.
//!
//! For a row `b` and a prime `l ∤ b` the oracle scans every `a` in
//! `[-u, u]` with `gcd(a, b) = 1` and a nonzero table entry, and counts
//!
//! * `#B_{l^e}`: entries with `l^e | a - bm`;
//! * `#A^s_{l^e}`, `#A^m_{l^e}`: entries with `l^e | F(a, b)`, split by
//!   whether `a` is a simple or a multiple root of `F(·, b) mod l`.
//!
//! Nothing here touches the sieve table or the lift ladders: the norm is
//! evaluated as a plain power sum and multiplicity is read off the partial
//! derivative `∂F/∂a`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, gcd_i64, max_exponent, primes_up_to};
use crate::engine::{Algorithm, Attempts, SieveOutcome};
use crate::error::{Error, Result};
use crate::poly::SievePolynomial;

/// Exact sizes of the set families for one `(b, l)`. Index `e - 1` holds
/// the size for `l^e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetFamily {
    pub b: u64,
    pub l: u64,
    pub rational: Vec<u64>,
    pub simple: Vec<u64>,
    pub multiple: Vec<u64>,
}

fn level(sizes: &[u64], e: usize) -> u64 {
    sizes.get(e.wrapping_sub(1)).copied().unwrap_or(0)
}

impl SetFamily {
    pub fn empty(b: u64, l: u64) -> Self {
        SetFamily {
            b,
            l,
            rational: Vec::new(),
            simple: Vec::new(),
            multiple: Vec::new(),
        }
    }

    /// `#B_{l^e}`.
    pub fn rational_at(&self, e: usize) -> u64 {
        level(&self.rational, e)
    }

    /// `#A^s_{l^e}`.
    pub fn simple_at(&self, e: usize) -> u64 {
        level(&self.simple, e)
    }

    /// `#A^m_{l^e}`.
    pub fn multiple_at(&self, e: usize) -> u64 {
        level(&self.multiple, e)
    }

    /// `#A_{l^e} = #A^s_{l^e} + #A^m_{l^e}`.
    pub fn algebraic_at(&self, e: usize) -> u64 {
        self.simple_at(e) + self.multiple_at(e)
    }

    fn bump(sizes: &mut Vec<u64>, valuation: u32) {
        let v = valuation as usize;
        if sizes.len() < v {
            sizes.resize(v, 0);
        }
        for slot in &mut sizes[..v] {
            *slot += 1;
        }
    }
}

/// Evaluates `F(a, b) = Σ c_i a^i b^(d-i)` term by term.
fn norm_power_sum(coeffs: &[BigInt], a: i64, b: i64) -> BigInt {
    let d = coeffs.len() - 1;
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * BigInt::from(a).pow(i as u32) * BigInt::from(b).pow((d - i) as u32))
        .sum()
}

/// `∂F/∂a (a, b) mod l`.
fn norm_partial_mod(coeffs_mod_l: &[u64], a: i64, b: i64, l: u64) -> u64 {
    let d = coeffs_mod_l.len() - 1;
    let q = l as u128;
    let a = a.rem_euclid(l as i64) as u128;
    let b = b.rem_euclid(l as i64) as u128;
    let pow = |base: u128, exp: usize| (0..exp).fold(1u128, |acc, _| acc * base % q);
    let mut sum = 0u128;
    for (i, &c) in coeffs_mod_l.iter().enumerate().skip(1) {
        let term = (i as u128 % q) * c as u128 % q * pow(a, i - 1) % q * pow(b, d - i) % q;
        sum = (sum + term) % q;
    }
    sum as u64
}

enum Value {
    Small(i128),
    Big(BigInt),
}

impl Value {
    fn new(v: BigInt) -> Self {
        match v.to_i128() {
            Some(s) => Value::Small(s),
            None => Value::Big(v),
        }
    }

    fn valuation(&self, l: u64) -> u32 {
        match self {
            Value::Small(s) => arith::valuation_i128(*s, l),
            Value::Big(v) => arith::valuation(v, l).expect("nonzero").get(),
        }
    }
}

/// Set families for row `b` and every prime in `primes` that does not
/// divide `b`.
pub fn compute_row_sets(f: &SievePolynomial, u: u64, b: u64, primes: &[u64]) -> Vec<SetFamily> {
    let coeffs = f.poly().coeffs();
    let primes: Vec<u64> = primes.iter().copied().filter(|l| !b.is_multiple_of(*l)).collect();
    let rational_bound = f.rational_bound(u);
    let algebraic_bound = f.algebraic_bound(u);
    let mut families: Vec<SetFamily> = primes
        .iter()
        .map(|&l| SetFamily {
            b,
            l,
            rational: vec![0; max_exponent(l, &rational_bound) as usize],
            simple: vec![0; max_exponent(l, &algebraic_bound) as usize],
            multiple: vec![0; max_exponent(l, &algebraic_bound) as usize],
        })
        .collect();
    let reduced: Vec<Vec<u64>> = primes.iter().map(|&l| f.poly().reduce(l).coeffs_vec()).collect();

    let b_signed = b as i64;
    for a in -(u as i64)..=u as i64 {
        if gcd_i64(a, b_signed) != 1 {
            continue;
        }
        let rational = a as i128 - b as i128 * f.m() as i128;
        let norm = norm_power_sum(coeffs, a, b_signed);
        if rational == 0 || norm.is_zero() {
            continue;
        }
        let norm = Value::new(norm);
        for ((family, &l), reduced) in families.iter_mut().zip(&primes).zip(&reduced) {
            SetFamily::bump(&mut family.rational, arith::valuation_i128(rational, l));
            let v = norm.valuation(l);
            if v == 0 {
                continue;
            }
            if norm_partial_mod(reduced, a, b_signed, l) == 0 {
                SetFamily::bump(&mut family.multiple, v);
            } else {
                SetFamily::bump(&mut family.simple, v);
            }
        }
    }
    families
}

pub fn compute_sets(f: &SievePolynomial, u: u64, b: u64, l: u64) -> Result<SetFamily> {
    if b.is_multiple_of(l) {
        return Err(Error::PrimeDividesRow { prime: l, row: b });
    }
    Ok(compute_row_sets(f, u, b, &[l]).pop().expect("one family"))
}

/// Exact division-attempt predictions for one `(b, l)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExactCost {
    /// Classical sieve: `#B_l + Σ #B_{l^e} + #A_l + Σ #A_{l^e}`.
    pub c_exact: u64,
    /// Improved sieve as tabulated: `Σ #B_{l^e} + Σ #A^s_{l^e} + #A^m_l + Σ_{e>=2} #A^m_{l^e}`.
    pub d_exact: u64,
    /// `#A^m_{l^2}`: the final failed test of the multiple-root while-loop,
    /// which `d_exact` leaves out.
    pub correction: u64,
}

impl ExactCost {
    /// What the improved sieve's ledger should show.
    pub fn improved_measured(&self) -> u64 {
        self.d_exact + self.correction
    }
}

pub fn predict_exact(sets: &SetFamily) -> ExactCost {
    let rational: u64 = sets.rational.iter().sum();
    let simple: u64 = sets.simple.iter().sum();
    let multiple: u64 = sets.multiple.iter().sum();
    let c_exact = sets.rational_at(1) + rational + sets.algebraic_at(1) + simple + multiple;
    let d_exact = rational + simple + multiple;
    ExactCost {
        c_exact,
        d_exact,
        correction: sets.multiple_at(2),
    }
}

/// Geometric-series closed forms for both sieves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymptoticCost {
    pub c_asym: BigRational,
    pub d_asym: BigRational,
}

pub fn predict_asymptotic(sets: &SetFamily) -> AsymptoticCost {
    let l = BigInt::from(sets.l);
    let one = BigInt::from(1);
    let level_one = BigRational::from(BigInt::from(sets.rational_at(1) + sets.simple_at(1)));
    let multiple_one = BigRational::from(BigInt::from(sets.multiple_at(1)));
    let deeper: u64 = sets.multiple.iter().skip(1).sum();
    let deeper = BigRational::from(BigInt::from(deeper));

    let classical_factor = BigRational::new(BigInt::from(2) * &l - &one, &l - &one);
    let improved_factor = BigRational::new(l.clone(), &l - &one);
    AsymptoticCost {
        c_asym: classical_factor * &level_one + BigRational::from(BigInt::from(2)) * &multiple_one + &deeper,
        d_asym: improved_factor * &level_one + &multiple_one + &deeper,
    }
}

/// One `(b, l)` comparison between the ledgers and the oracle.
#[derive(Clone, Debug)]
pub struct CellCheck {
    pub b: u64,
    pub l: u64,
    pub sets: SetFamily,
    pub classical: Attempts,
    pub improved: Attempts,
    pub exact: ExactCost,
    pub asymptotic: AsymptoticCost,
}

impl CellCheck {
    /// `D_asym <= (2/3) C_asym`.
    pub fn within_two_thirds(&self) -> bool {
        let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
        self.asymptotic.d_asym <= two_thirds * &self.asymptotic.c_asym
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityViolation {
    pub b: u64,
    pub l: u64,
    pub what: &'static str,
    pub expected: u64,
    pub measured: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReportTotals {
    pub classical: u64,
    pub improved: u64,
    pub c_exact: u64,
    pub d_exact: u64,
    pub correction: u64,
}

#[derive(Clone, Debug)]
pub struct LedgerReport {
    pub u: u64,
    pub bound: u64,
    pub cells: Vec<CellCheck>,
    pub violations: Vec<IdentityViolation>,
    pub totals: ReportTotals,
}

impl LedgerReport {
    pub fn identities_hold(&self) -> bool {
        self.violations.is_empty()
    }

    /// Improved over classical attempts, exact.
    pub fn ratio(&self) -> Option<BigRational> {
        (self.totals.classical > 0).then(|| {
            BigRational::new(
                BigInt::from(self.totals.improved),
                BigInt::from(self.totals.classical),
            )
        })
    }

    pub fn ratio_f64(&self) -> Option<f64> {
        self.ratio().map(|r| r.to_f64().unwrap_or(f64::NAN))
    }

    /// Aggregate improved attempts are strictly below the classical ones,
    /// or nothing was attempted at all.
    pub fn strictly_improves(&self) -> bool {
        self.totals.classical == 0 || self.totals.improved < self.totals.classical
    }

    /// Cells without liftable multiple roots whose asymptotic forms break
    /// the 2/3 bound.
    pub fn two_thirds_failures(&self) -> Vec<(u64, u64)> {
        self.cells
            .iter()
            .filter(|c| c.exact.correction == 0 && !c.within_two_thirds())
            .map(|c| (c.b, c.l))
            .collect()
    }

    /// Cells checked against the 2/3 bound (those with zero correction).
    pub fn two_thirds_checked(&self) -> usize {
        self.cells.iter().filter(|c| c.exact.correction == 0).count()
    }

    pub fn c_asym_total(&self) -> BigRational {
        self.cells.iter().map(|c| c.asymptotic.c_asym.clone()).sum()
    }

    pub fn d_asym_total(&self) -> BigRational {
        self.cells.iter().map(|c| c.asymptotic.d_asym.clone()).sum()
    }
}

/// Checks both ledgers against the oracle for every `(b, l)` with `l ∤ b`.
pub fn verify_ledgers(
    classical: &SieveOutcome,
    improved: &SieveOutcome,
    f: &SievePolynomial,
    u: u64,
    y: u64,
) -> Result<LedgerReport> {
    if classical.algorithm != Algorithm::Classical || improved.algorithm != Algorithm::Improved {
        return Err(Error::InvalidConfig(
            "verify_ledgers expects a classical and an improved outcome".into(),
        ));
    }
    for outcome in [classical, improved] {
        if outcome.table.u() != u || outcome.bound != y {
            return Err(Error::InvalidConfig(format!(
                "outcome was computed for u = {}, y = {}, not u = {u}, y = {y}",
                outcome.table.u(),
                outcome.bound
            )));
        }
    }
    let primes = primes_up_to(y)?;

    let cells: Vec<CellCheck> = (1..=u)
        .into_par_iter()
        .flat_map_iter(|b| {
            compute_row_sets(f, u, b, primes.as_slice())
                .into_iter()
                .map(move |sets| (b, sets))
        })
        .map(|(b, sets)| CellCheck {
            b,
            l: sets.l,
            classical: classical.ledger[(b, sets.l)],
            improved: improved.ledger[(b, sets.l)],
            exact: predict_exact(&sets),
            asymptotic: predict_asymptotic(&sets),
            sets,
        })
        .collect();

    let mut violations = Vec::new();
    let mut totals = ReportTotals::default();
    for cell in &cells {
        let (b, l) = (cell.b, cell.l);
        let mut check = |what, expected: u64, measured: u64| {
            if expected != measured {
                violations.push(IdentityViolation {
                    b,
                    l,
                    what,
                    expected,
                    measured,
                });
            }
        };
        let sets = &cell.sets;
        check("classical total = C_exact", cell.exact.c_exact, cell.classical.total());
        check(
            "improved total = D_exact + correction",
            cell.exact.improved_measured(),
            cell.improved.total(),
        );
        check(
            "improved rational = sum #B_{l^e}",
            sets.rational.iter().sum(),
            cell.improved.rational,
        );
        check(
            "improved simple = sum #A^s_{l^e}",
            sets.simple.iter().sum(),
            cell.improved.algebraic_simple,
        );
        check(
            "improved multiple = #A^m_l + sum_{e>=2} #A^m_{l^e} + correction",
            sets.multiple.iter().sum::<u64>() + cell.exact.correction,
            cell.improved.algebraic_multiple,
        );

        totals.classical += cell.classical.total();
        totals.improved += cell.improved.total();
        totals.c_exact += cell.exact.c_exact;
        totals.d_exact += cell.exact.d_exact;
        totals.correction += cell.exact.correction;
    }

    // Rows with l | b must never be charged.
    for outcome in [classical, improved] {
        for ((b, l), attempts) in outcome.ledger.cells() {
            if b % l == 0 && attempts.total() > 0 {
                violations.push(IdentityViolation {
                    b,
                    l,
                    what: "no attempts when l | b",
                    expected: 0,
                    measured: attempts.total(),
                });
            }
        }
    }

    Ok(LedgerReport {
        u,
        bound: y,
        cells,
        violations,
        totals,
    })
}
