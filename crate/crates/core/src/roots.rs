//! Roots of `f` modulo primes and prime powers, and the exponent ladders
//! consumed by the improved sieve.
//!
//! For every prime `l <= y` the improved sieve needs:
//!
//! * the rational ladder `m mod l^e`, one residue per exponent up to the
//!   cap `l^e <= u(m+1)`;
//! * the simple-root ladders: each simple root of `f mod l` Hensel-lifted to
//!   every `l^e <= m(d+1)u^d` (the lift is unique);
//! * the multiple roots of `f mod l`, and the subset of them that are roots
//!   modulo `l^2`. Whether a multiple root lifts depends only on its residue
//!   class mod `l`, so both sets are stored as residues mod `l`.
//!
//! Root finding is an exhaustive scan of `[0, l)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, max_exponent, mod_inverse, primes_up_to};
use crate::error::{Error, Result};
use crate::poly::{Polynomial, SievePolynomial};

/// Roots of `f mod l`, split by whether `f'` vanishes there.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RootClassification {
    pub prime: u64,
    pub simple: Vec<u64>,
    pub multiple: Vec<u64>,
}

impl RootClassification {
    /// Every root, ascending.
    pub fn all(&self) -> Vec<u64> {
        let mut all: Vec<u64> = self.simple.iter().chain(&self.multiple).copied().collect();
        all.sort_unstable();
        all
    }

    pub fn is_multiple(&self, root: u64) -> bool {
        self.multiple.binary_search(&root).is_ok()
    }
}

pub fn classify_roots(f: &Polynomial, l: u64) -> RootClassification {
    let reduced = f.reduce(l);
    let mut out = RootClassification {
        prime: l,
        ..Default::default()
    };
    for x in 0..l {
        if reduced.eval(x) != 0 {
            continue;
        }
        if reduced.derivative(x) == 0 {
            out.multiple.push(x);
        } else {
            out.simple.push(x);
        }
    }
    out
}

/// Lifts a simple root of `f mod l` to the unique root modulo `l^e` in its
/// residue class.
pub fn hensel_lift_simple(f: &Polynomial, l: u64, root: u64, e: u32) -> Result<u128> {
    let chain = lift_chain(f, l, root, e.max(1))?;
    Ok(*chain.last().expect("chain has at least one level"))
}

/// The lifts of `root` modulo `l, l^2, ..., l^levels`.
pub(crate) fn lift_chain(f: &Polynomial, l: u64, root: u64, levels: u32) -> Result<Vec<u128>> {
    let prime = BigInt::from(l);
    let mut x = BigInt::from(root % l);
    if !f.eval_mod(&x, &prime).is_zero() {
        return Err(Error::NotSimpleRoot { root, prime: l });
    }
    let derivative = f.derivative_eval(&x);
    if mod_inverse(&derivative, &prime).is_err() {
        return Err(Error::NotSimpleRoot { root, prime: l });
    }
    let mut chain = Vec::with_capacity(levels as usize);
    chain.push(to_residue(&x)?);
    let mut modulus = prime.clone();
    for _ in 1..levels {
        modulus *= &prime;
        // Newton step modulo the next power; f'(x) stays a unit since x ≡ root mod l.
        let inv = mod_inverse(&f.derivative_eval(&x), &modulus)?;
        x = (&x - f.eval(&x) * inv).mod_floor(&modulus);
        chain.push(to_residue(&x)?);
    }
    Ok(chain)
}

fn to_residue(x: &BigInt) -> Result<u128> {
    x.to_u128()
        .ok_or_else(|| Error::RegionTooLarge(format!("residue {x} does not fit 128 bits")))
}

/// Whether a multiple root of `f mod l` is also a root modulo `l^2`. The
/// answer is the same for every integer in the residue class of `root`.
pub fn lift_multiple_test(f: &Polynomial, l: u64, root: u64) -> Result<bool> {
    let reduced = f.reduce(l);
    let r = root % l;
    if reduced.eval(r) != 0 || reduced.derivative(r) != 0 {
        return Err(Error::NotMultipleRoot { root, prime: l });
    }
    let square = l.checked_mul(l).ok_or_else(|| {
        Error::RegionTooLarge(format!("prime {l} is too large to square in 64 bits"))
    })?;
    Ok(f.reduce(square).eval(r) == 0)
}

/// Per-prime data for the improved sieve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeLadder {
    pub prime: u64,
    /// `rational[e-1] = m mod l^e`.
    pub rational: Vec<u128>,
    /// `simple[e-1]` holds the simple roots modulo `l^e`, each the lift of
    /// the matching entry of `simple[0]`.
    pub simple: Vec<Vec<u128>>,
    /// Multiple roots of `f mod l`.
    pub multiple: Vec<u64>,
    /// Multiple roots of `f mod l` that are roots mod `l^2`, as residues mod `l`.
    pub liftable: Vec<u64>,
}

impl PrimeLadder {
    pub fn rational_cap(&self) -> u32 {
        self.rational.len() as u32
    }

    pub fn algebraic_cap(&self) -> u32 {
        self.simple.len() as u32
    }

    /// Simple roots modulo `l^e` (1-based exponent).
    pub fn simple_at(&self, e: u32) -> &[u128] {
        &self.simple[e as usize - 1]
    }
}

/// Work done while building ladders and root lists; kept out of the sieve
/// cost ledgers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PrecomputeStats {
    /// Polynomial evaluations spent scanning residues mod `l`.
    pub root_scan_evaluations: u64,
    /// Newton steps spent lifting simple roots.
    pub hensel_steps: u64,
    /// Evaluations mod `l^2` deciding multiple-root liftability.
    pub lift_tests: u64,
    /// Residues `m mod l^e` computed.
    pub rational_residues: u64,
}

impl std::ops::AddAssign for PrecomputeStats {
    fn add_assign(&mut self, rhs: Self) {
        self.root_scan_evaluations += rhs.root_scan_evaluations;
        self.hensel_steps += rhs.hensel_steps;
        self.lift_tests += rhs.lift_tests;
        self.rational_residues += rhs.rational_residues;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftTables {
    pub u: u64,
    pub bound: u64,
    pub ladders: Vec<PrimeLadder>,
    pub stats: PrecomputeStats,
}

impl LiftTables {
    pub fn ladder(&self, l: u64) -> Option<&PrimeLadder> {
        self.ladders
            .binary_search_by_key(&l, |ladder| ladder.prime)
            .ok()
            .map(|i| &self.ladders[i])
    }
}

/// Largest modulus the progression arithmetic accepts.
pub(crate) const MAX_MODULUS: u128 = 1 << 120;

pub fn build_lift_tables(f: &SievePolynomial, u: u64, y: u64) -> Result<LiftTables> {
    if u < 1 {
        return Err(Error::InvalidConfig("u must be at least 1".into()));
    }
    let primes = primes_up_to(y)?;
    let rational_bound = f.rational_bound(u);
    let algebraic_bound = f.algebraic_bound(u);
    if algebraic_bound >= BigUint::from(MAX_MODULUS) {
        return Err(Error::RegionTooLarge(format!(
            "algebraic bound {algebraic_bound} exceeds 2^120"
        )));
    }
    let built: Vec<(PrimeLadder, PrecomputeStats)> = primes
        .as_slice()
        .par_iter()
        .map(|&l| build_ladder(f, l, &rational_bound, &algebraic_bound))
        .collect::<Result<_>>()?;

    let mut stats = PrecomputeStats::default();
    let mut ladders = Vec::with_capacity(built.len());
    for (ladder, s) in built {
        stats += s;
        ladders.push(ladder);
    }
    Ok(LiftTables {
        u,
        bound: y,
        ladders,
        stats,
    })
}

fn build_ladder(
    f: &SievePolynomial,
    l: u64,
    rational_bound: &BigUint,
    algebraic_bound: &BigUint,
) -> Result<(PrimeLadder, PrecomputeStats)> {
    let mut stats = PrecomputeStats::default();
    let rational_cap = max_exponent(l, rational_bound);
    let algebraic_cap = max_exponent(l, algebraic_bound);

    let rational = (1..=rational_cap)
        .map(|e| {
            let q = arith::checked_pow(l, e).expect("capped below the rational bound");
            (f.m() as u128) % q
        })
        .collect::<Vec<_>>();
    stats.rational_residues = rational.len() as u64;

    let roots = classify_roots(f.poly(), l);
    stats.root_scan_evaluations = l;

    let mut simple = vec![Vec::with_capacity(roots.simple.len()); algebraic_cap as usize];
    for &root in &roots.simple {
        let chain = lift_chain(f.poly(), l, root, algebraic_cap.max(1))?;
        stats.hensel_steps += u64::from(algebraic_cap.saturating_sub(1));
        for (level, x) in simple.iter_mut().zip(chain) {
            level.push(x);
        }
    }

    let mut liftable = Vec::new();
    for &root in &roots.multiple {
        stats.lift_tests += 1;
        if lift_multiple_test(f.poly(), l, root)? {
            liftable.push(root);
        }
    }

    Ok((
        PrimeLadder {
            prime: l,
            rational,
            simple,
            multiple: roots.multiple,
            liftable,
        },
        stats,
    ))
}
