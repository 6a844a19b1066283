//! Integer and modular arithmetic shared by the sieve engines and oracles.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// All primes up to a bound, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeList {
    bound: u64,
    primes: Vec<u64>,
}

impl PrimeList {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }
}

/// Sieve of Eratosthenes over `[2, y]`.
pub fn primes_up_to(y: u64) -> Result<PrimeList> {
    if y < 2 {
        return Err(Error::EmptyRange { bound: y });
    }
    let n = usize::try_from(y).map_err(|_| Error::EmptyRange { bound: y })?;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    Ok(PrimeList { bound: y, primes })
}

/// Exponent of exact divisibility: `l^e | n` and `l^(e+1) ∤ n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Valuation(pub u32);

impl Valuation {
    pub fn get(self) -> u32 {
        self.0
    }
}

pub fn valuation(n: &BigInt, l: u64) -> Result<Valuation> {
    if n.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if let Some(small) = n.to_i128() {
        return Ok(Valuation(valuation_i128(small, l)));
    }
    let l = BigInt::from(l);
    let mut rest = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = rest.div_rem(&l);
        if !r.is_zero() {
            return Ok(Valuation(e));
        }
        rest = q;
        e += 1;
    }
}

/// Fast path for nonzero values that fit a machine word.
pub(crate) fn valuation_i128(mut n: i128, l: u64) -> u32 {
    debug_assert!(n != 0);
    let l = l as i128;
    let mut e = 0;
    while n % l == 0 {
        n /= l;
        e += 1;
    }
    e
}

/// Inverse of `x` modulo `modulus`, reduced into `[0, modulus)`.
pub fn mod_inverse(x: &BigInt, modulus: &BigInt) -> Result<BigInt> {
    if *modulus < BigInt::from(2) {
        return Err(Error::NotInvertible {
            value: x.to_string(),
            modulus: modulus.to_string(),
        });
    }
    let reduced = x.mod_floor(modulus);
    let egcd = reduced.extended_gcd(modulus);
    if !egcd.gcd.is_one() {
        return Err(Error::NotInvertible {
            value: x.to_string(),
            modulus: modulus.to_string(),
        });
    }
    Ok(egcd.x.mod_floor(modulus))
}

/// Largest `e` with `l^e <= bound`.
pub fn max_exponent(l: u64, bound: &BigUint) -> u32 {
    assert!(l >= 2, "max_exponent needs a base of at least 2");
    let l = BigUint::from(l);
    let mut power = l.clone();
    let mut e = 0;
    while power <= *bound {
        e += 1;
        power *= &l;
    }
    e
}

/// `l^e` as a `u128`, or `None` on overflow.
pub(crate) fn checked_pow(l: u64, e: u32) -> Option<u128> {
    (l as u128).checked_pow(e)
}

/// `(a * b) mod m` without overflow for any `u128` operands.
pub(crate) fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    match a.checked_mul(b) {
        Some(p) => p % m,
        None => {
            let p = BigUint::from(a) * BigUint::from(b) % BigUint::from(m);
            p.to_u128().expect("residue below a u128 modulus")
        }
    }
}

pub(crate) fn gcd_i64(a: i64, b: i64) -> u64 {
    a.unsigned_abs().gcd(&b.unsigned_abs())
}
