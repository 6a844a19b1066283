//! The defining polynomial `f`, its homogenized norm form `F(a, b)`, and
//! the region bounds that cap the exponent ladders.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A monic integer polynomial of degree at least one, coefficients stored
/// from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<BigInt>,
}

impl Polynomial {
    pub fn monic(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidPolynomial(
                "need at least two coefficients (degree >= 1)".into(),
            ));
        }
        if !coeffs.last().is_some_and(One::is_one) {
            return Err(Error::InvalidPolynomial(format!(
                "leading coefficient must be 1, got {}",
                coeffs.last().unwrap()
            )));
        }
        Ok(Polynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::monic(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// `f(x) mod modulus` in `[0, modulus)`.
    pub fn eval_mod(&self, x: &BigInt, modulus: &BigInt) -> BigInt {
        assert!(modulus.is_positive(), "modulus must be positive");
        let x = x.mod_floor(modulus);
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| (acc * &x + c).mod_floor(modulus))
    }

    pub fn derivative_eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(BigInt::zero(), |acc, (i, c)| acc * x + c * BigInt::from(i))
    }

    /// `f'(x) mod l` in `[0, l)`.
    pub fn derivative_mod(&self, x: &BigInt, l: u64) -> u64 {
        self.reduce(l).derivative(x.mod_floor(&BigInt::from(l)).to_u64().unwrap())
    }

    /// Coefficients reduced into `[0, modulus)` for word-sized evaluation.
    pub fn reduce(&self, modulus: u64) -> ReducedPoly {
        assert!(modulus >= 1, "modulus must be positive");
        let m = BigInt::from(modulus);
        ReducedPoly {
            modulus,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.mod_floor(&m).to_u64().expect("residue fits the modulus"))
                .collect(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// A polynomial with coefficients reduced modulo a word-sized modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedPoly {
    modulus: u64,
    coeffs: Vec<u64>,
}

impl ReducedPoly {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeffs_vec(&self) -> Vec<u64> {
        self.coeffs.clone()
    }

    pub fn eval(&self, x: u64) -> u64 {
        let m = self.modulus as u128;
        let x = x as u128 % m;
        self.coeffs
            .iter()
            .rev()
            .fold(0u128, |acc, &c| (acc * x + c as u128) % m) as u64
    }

    pub fn derivative(&self, x: u64) -> u64 {
        let m = self.modulus as u128;
        let x = x as u128 % m;
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0u128, |acc, (i, &c)| {
                (acc * x + (c as u128 * (i as u128 % m)) % m) % m
            }) as u64
    }
}

/// The defining polynomial of the sieve together with the integer `m`,
/// which is both the coefficient bound and the rational-side root.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SievePolynomial {
    poly: Polynomial,
    m: u64,
}

impl SievePolynomial {
    pub fn new(poly: Polynomial, m: u64) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidPolynomial("m must be positive".into()));
        }
        if poly.degree() < 2 {
            return Err(Error::InvalidPolynomial(format!(
                "degree must be at least 2, got {}",
                poly.degree()
            )));
        }
        let bound = BigInt::from(m);
        if let Some((i, c)) = poly
            .coeffs()
            .iter()
            .enumerate()
            .find(|(_, c)| c.abs() > bound)
        {
            return Err(Error::InvalidPolynomial(format!(
                "coefficient c_{i} = {c} exceeds the bound m = {m}"
            )));
        }
        Ok(SievePolynomial { poly, m })
    }

    pub fn from_i64(coeffs: &[i64], m: u64) -> Result<Self> {
        Self::new(Polynomial::from_i64(coeffs)?, m)
    }

    /// Parses the `c_0,...,c_d` text form.
    pub fn parse(text: &str, m: u64) -> Result<Self> {
        Self::new(text.parse()?, m)
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn norm_form(&self) -> NormForm {
        NormForm {
            coeffs: self.poly.coeffs().to_vec(),
        }
    }

    /// `u(m+1)`, bounding `|a - bm|` over the region.
    pub fn rational_bound(&self, u: u64) -> BigUint {
        BigUint::from(u) * BigUint::from(self.m + 1)
    }

    /// `m(d+1)u^d`, bounding `|F(a, b)|` over the region.
    pub fn algebraic_bound(&self, u: u64) -> BigUint {
        let d = self.degree();
        BigUint::from(self.m) * BigUint::from(d + 1) * BigUint::from(u).pow(d as u32)
    }
}

impl AsRef<Polynomial> for SievePolynomial {
    fn as_ref(&self) -> &Polynomial {
        &self.poly
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|part| {
                part.trim().parse::<BigInt>().map_err(|_| {
                    Error::InvalidPolynomial(format!("cannot parse coefficient {part:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Polynomial::monic(coeffs)
    }
}

/// The binary form `F(a, b) = sum c_i a^i b^(d-i) = b^d f(a/b)`, used as the
/// norm `Nm(a - b theta)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormForm {
    /// `coeffs[i]` multiplies `a^i b^(d-i)`.
    coeffs: Vec<BigInt>,
}

impl NormForm {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval(&self, a: i64, b: i64) -> BigInt {
        let a = BigInt::from(a);
        let b = BigInt::from(b);
        let mut b_power = BigInt::one();
        let mut acc = BigInt::zero();
        // Horner in a, with the matching power of b folded into each coefficient.
        for c in self.coeffs.iter().rev() {
            acc = acc * &a + c * &b_power;
            b_power *= &b;
        }
        acc
    }
}
