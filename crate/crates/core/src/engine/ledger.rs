use std::collections::BTreeMap;
use std::ops::{AddAssign, Index};

use serde::Serialize;

/// Which loop of which sieve performed a division attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Algorithm 1: every entry, every prime.
    Trivial,
    /// Progressions `a ≡ bm (mod l^e)`.
    Rational,
    /// Progressions through simple roots of `f`.
    AlgebraicSimple,
    /// Progressions through multiple roots of `f`.
    AlgebraicMultiple,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Trivial => "trivial",
            Phase::Rational => "rational",
            Phase::AlgebraicSimple => "algebraic-simple",
            Phase::AlgebraicMultiple => "algebraic-multiple",
        }
    }
}

/// Division-attempt counters for one `(b, l)` cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Attempts {
    pub trivial: u64,
    pub rational: u64,
    pub algebraic_simple: u64,
    pub algebraic_multiple: u64,
}

impl Attempts {
    pub fn total(&self) -> u64 {
        self.trivial + self.rational + self.algebraic_simple + self.algebraic_multiple
    }

    pub fn algebraic(&self) -> u64 {
        self.algebraic_simple + self.algebraic_multiple
    }

    pub(crate) fn bump(&mut self, phase: Phase, n: u64) {
        match phase {
            Phase::Trivial => self.trivial += n,
            Phase::Rational => self.rational += n,
            Phase::AlgebraicSimple => self.algebraic_simple += n,
            Phase::AlgebraicMultiple => self.algebraic_multiple += n,
        }
    }
}

impl AddAssign for Attempts {
    fn add_assign(&mut self, rhs: Self) {
        self.trivial += rhs.trivial;
        self.rational += rhs.rational;
        self.algebraic_simple += rhs.algebraic_simple;
        self.algebraic_multiple += rhs.algebraic_multiple;
    }
}

/// Exact division attempts keyed by `(b, l)`. Cells only appear once they
/// have been visited by a sieve loop, so rows skipped because `l | b` have
/// no cell at all.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CostLedger {
    cells: BTreeMap<(u64, u64), Attempts>,
}

static NO_ATTEMPTS: Attempts = Attempts {
    trivial: 0,
    rational: 0,
    algebraic_simple: 0,
    algebraic_multiple: 0,
};

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, b: u64, l: u64, phase: Phase, n: u64) {
        self.cells.entry((b, l)).or_default().bump(phase, n);
    }

    /// Registers a visited cell without charging it.
    pub(crate) fn touch(&mut self, b: u64, l: u64) {
        self.cells.entry((b, l)).or_default();
    }

    pub fn get(&self, b: u64, l: u64) -> Attempts {
        self.cells.get(&(b, l)).copied().unwrap_or_default()
    }

    pub fn cells(&self) -> impl Iterator<Item = ((u64, u64), Attempts)> + '_ {
        self.cells.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn totals(&self) -> Attempts {
        let mut sum = Attempts::default();
        for v in self.cells.values() {
            sum += *v;
        }
        sum
    }

    pub fn grand_total(&self) -> u64 {
        self.totals().total()
    }

    /// Attempts charged to prime `l` across all rows.
    pub fn prime_total(&self, l: u64) -> u64 {
        self.cells
            .iter()
            .filter(|((_, p), _)| *p == l)
            .map(|(_, v)| v.total())
            .sum()
    }

    pub fn merge(&mut self, other: CostLedger) {
        for (k, v) in other.cells {
            *self.cells.entry(k).or_default() += v;
        }
    }
}

impl Index<(u64, u64)> for CostLedger {
    type Output = Attempts;

    fn index(&self, key: (u64, u64)) -> &Attempts {
        self.cells.get(&key).unwrap_or(&NO_ATTEMPTS)
    }
}

impl AddAssign for CostLedger {
    fn add_assign(&mut self, rhs: Self) {
        self.merge(rhs);
    }
}
