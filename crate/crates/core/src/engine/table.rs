use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::gcd_i64;
use crate::poly::SievePolynomial;

/// One table entry. Values that fit a machine word stay unboxed; the
/// representation is normalized so structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Cell {
    Small(i128),
    Big(BigInt),
}

impl Cell {
    pub(crate) fn new(v: BigInt) -> Self {
        match v.to_i128() {
            Some(s) => Cell::Small(s),
            None => Cell::Big(v),
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        matches!(self, Cell::Small(0))
    }

    pub(crate) fn divisible_by(&self, l: u64) -> bool {
        match self {
            Cell::Small(v) => v % l as i128 == 0,
            Cell::Big(v) => (v % l).is_zero(),
        }
    }

    /// Fused test-and-divide: divides and returns `true` when `l` divides
    /// the entry, leaves it untouched otherwise.
    pub(crate) fn try_divide(&mut self, l: u64) -> bool {
        if !self.divisible_by(l) {
            return false;
        }
        match self {
            Cell::Small(v) => *v /= l as i128,
            Cell::Big(v) => {
                let q = &*v / l;
                *self = Cell::new(q);
            }
        }
        true
    }

    pub(crate) fn to_bigint(&self) -> BigInt {
        match self {
            Cell::Small(v) => BigInt::from(*v),
            Cell::Big(v) => v.clone(),
        }
    }
}

/// The grid `T(b, a)` for `b` in `[1, u]` and `a` in `[-u, u]`.
///
/// Entries on coprime pairs hold `(a - bm) F(a, b)`; everything else, and
/// any pair where that product vanishes, holds zero and is never touched by
/// the sieves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveTable {
    u: u64,
    pub(crate) rows: Vec<Vec<Cell>>,
}

impl SieveTable {
    pub fn build(f: &SievePolynomial, u: u64) -> Self {
        assert!(u >= 1, "region parameter u must be at least 1");
        let form = f.norm_form();
        let m = f.m() as i128;
        let rows = (1..=u as i64)
            .into_par_iter()
            .map(|b| {
                (-(u as i64)..=u as i64)
                    .map(|a| {
                        if gcd_i64(a, b) != 1 {
                            return Cell::Small(0);
                        }
                        let rational = BigInt::from(a as i128 - b as i128 * m);
                        Cell::new(rational * form.eval(a, b))
                    })
                    .collect()
            })
            .collect();
        SieveTable { u, rows }
    }

    /// A table with caller-supplied entries, one row per `b` starting at 1,
    /// each of length `2u + 1`.
    pub fn from_rows(u: u64, rows: Vec<Vec<BigInt>>) -> Self {
        let width = 2 * u as usize + 1;
        assert_eq!(rows.len(), u as usize, "expected {u} rows");
        let rows = rows
            .into_iter()
            .map(|row| {
                assert_eq!(row.len(), width, "every row needs {width} entries");
                row.into_iter().map(Cell::new).collect()
            })
            .collect();
        SieveTable { u, rows }
    }

    pub fn u(&self) -> u64 {
        self.u
    }

    pub fn entry(&self, b: u64, a: i64) -> BigInt {
        self.rows[self.row_index(b)][self.column(a)].to_bigint()
    }

    pub(crate) fn row_index(&self, b: u64) -> usize {
        assert!(b >= 1 && b <= self.u, "row {b} outside [1, {}]", self.u);
        (b - 1) as usize
    }

    pub(crate) fn column(&self, a: i64) -> usize {
        assert!(a.unsigned_abs() <= self.u, "column {a} outside [-u, u]");
        (a + self.u as i64) as usize
    }

    /// `(b, a, value)` for every nonzero entry, in row-major order.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (u64, i64, BigInt)> + '_ {
        let u = self.u as i64;
        self.rows.iter().enumerate().flat_map(move |(i, row)| {
            row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(j, c)| {
                (i as u64 + 1, j as i64 - u, c.to_bigint())
            })
        })
    }

    pub fn nonzero_count(&self) -> usize {
        self.rows
            .iter()
            .map(|row| row.iter().filter(|c| !c.is_zero()).count())
            .sum()
    }

    /// Whether no nonzero entry is divisible by any of `primes`.
    pub fn is_coprime_to(&self, primes: &[u64]) -> bool {
        self.rows.par_iter().all(|row| {
            row.iter()
                .filter(|c| !c.is_zero())
                .all(|c| primes.iter().all(|&l| !c.divisible_by(l)))
        })
    }
}
