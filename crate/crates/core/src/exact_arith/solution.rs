use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

/// A candidate `(n, (a_1 < ... < a_k))` for `n/2^n = sum a_i/2^a_i`.
///
/// Terms are stored as offsets `d_i = a_i - n`, which keeps `n` unbounded
/// (trivial and family solutions have `n` near `2^k`) while the offsets stay
/// machine words. Construction checks the structural invariants only; whether
/// the equation holds is decided by [`verify_solution`](super::verify_solution).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution {
    n: BigUint,
    offsets: Vec<u64>,
}

impl Solution {
    pub fn new(n: u64, terms: Vec<u64>) -> Result<Self> {
        if terms.iter().any(|&a| a <= n) {
            return Err(Error::InvalidSolution("first term must exceed n"));
        }
        Self::from_offsets(BigUint::from(n), terms.iter().map(|a| a - n).collect())
    }

    pub fn from_offsets(n: BigUint, offsets: Vec<u64>) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::InvalidSolution("n must be positive"));
        }
        if offsets.len() < 2 {
            return Err(Error::InvalidSolution("at least two terms are required"));
        }
        if offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSolution("terms must be strictly increasing"));
        }
        if offsets[0] == 0 {
            return Err(Error::InvalidSolution("first term must exceed n"));
        }
        Ok(Self { n, offsets })
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn n_u64(&self) -> Option<u64> {
        self.n.to_u64()
    }

    /// `a_i - n` for each term.
    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn term(&self, i: usize) -> BigUint {
        &self.n + self.offsets[i]
    }

    pub fn terms(&self) -> Vec<BigUint> {
        (0..self.k()).map(|i| self.term(i)).collect()
    }

    /// The terms as machine words, when they fit.
    pub fn terms_u64(&self) -> Option<Vec<u64>> {
        let n = self.n_u64()?;
        self.offsets.iter().map(|d| n.checked_add(*d)).collect()
    }

    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    pub fn first(&self) -> BigUint {
        self.term(0)
    }

    pub fn last(&self) -> BigUint {
        self.term(self.k() - 1)
    }
}

/// `[n,(a_1,...,a_k)]`
impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},(", self.n)?;
        for i in 0..self.k() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", self.term(i))?;
        }
        f.write_str(")]")
    }
}
