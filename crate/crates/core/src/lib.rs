//! A line-sieving laboratory for the number field sieve.
//!
//! Builds the table `T(b, a) = (a - bm) F(a, b)` over `1 <= b <= u`,
//! `|a| <= u` and strips every prime-power divisor `l^e` with `l <= y`
//! using three sieves: a trivial one, the classical progression sieve, and
//! an improved sieve that replaces most divisibility tests with
//! unconditional divisions along Hensel-lifted root ladders. Every
//! test-and-divide is counted, and brute-force oracles predict those counts
//! exactly.

pub mod arith;
pub mod cli;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod poly;
pub mod roots;

pub use engine::{Algorithm, Attempts, CostLedger, SieveOutcome, SieveTable};
pub use error::{Error, Result};
pub use poly::{NormForm, Polynomial, SievePolynomial};
