use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

/// A non-negative rational `num / 2^exp` kept in lowest terms: `num` is odd,
/// or `num == 0` and `exp == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    num: BigUint,
    exp: u64,
}

impl DyadicRational {
    pub fn new(num: impl Into<BigUint>, exp: u64) -> Self {
        let mut num = num.into();
        if num.is_zero() {
            return Self::zero();
        }
        let tz = num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(exp);
        num >>= shift;
        let exp = exp - shift;
        // Integers (exp = 0) may keep an even numerator; proper fractions are odd.
        debug_assert!(exp == 0 || num.bit(0));
        Self { num, exp }
    }

    pub fn zero() -> Self {
        Self {
            num: BigUint::zero(),
            exp: 0,
        }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn exp(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Numerator over the common denominator `2^exp`, `exp >= self.exp`.
    pub(crate) fn scaled_num(&self, exp: u64) -> BigUint {
        debug_assert!(exp >= self.exp);
        &self.num << (exp - self.exp)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        let e = self.exp.max(rhs.exp);
        let a = self.scaled_num(e);
        let b = rhs.scaled_num(e);
        if b > a {
            return Err(Error::Underflow);
        }
        Ok(Self::new(a - b, e))
    }

    /// Nearest `f64`; only used for reporting and cross-checks.
    pub fn to_f64(&self) -> f64 {
        let bits = self.num.bits();
        if bits <= 64 {
            return self.num.to_f64().unwrap_or(f64::NAN) * (-(self.exp as f64)).exp2();
        }
        let drop = bits - 64;
        let top = (&self.num >> drop).to_f64().unwrap_or(f64::NAN);
        top * (drop as f64 - self.exp as f64).exp2()
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        self.scaled_num(e).cmp(&other.scaled_num(e))
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;

    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        let e = self.exp.max(rhs.exp);
        DyadicRational::new(self.scaled_num(e) + rhs.scaled_num(e), e)
    }
}

impl Add for DyadicRational {
    type Output = DyadicRational;

    fn add(self, rhs: DyadicRational) -> DyadicRational {
        &self + &rhs
    }
}
