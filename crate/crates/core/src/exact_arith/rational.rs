use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::DyadicRational;
use crate::{Error, Result};

/// Exact rational in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::Precondition("zero denominator".into()));
        }
        Ok(Self(BigRational::new(num.into(), den)))
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(v.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// `self * 2^k`.
    pub fn mul_pow2(&self, k: u64) -> Self {
        let two_k = BigInt::one() << k;
        Self(&self.0 * BigRational::from_integer(two_k))
    }

    /// `self / 2^k`.
    pub fn div_pow2(&self, k: u64) -> Self {
        let two_k = BigInt::one() << k;
        Self(&self.0 / BigRational::from_integer(two_k))
    }

    /// The dyadic value, when the denominator is a power of two and the value is non-negative.
    pub fn to_dyadic(&self) -> Option<DyadicRational> {
        let den = self.denom().magnitude();
        if self.numer().sign() == Sign::Minus || den.count_ones() != 1 {
            return None;
        }
        let exp = den.trailing_zeros().unwrap_or(0);
        Some(DyadicRational::new(self.numer().magnitude().clone(), exp))
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<&DyadicRational> for Rational {
    fn from(d: &DyadicRational) -> Self {
        let den = BigUint::one() << d.exp();
        Self(BigRational::new(
            BigInt::from(d.num().clone()),
            BigInt::from(den),
        ))
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parses `p/q` or a bare integer `p`.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Precondition(format!("malformed fraction {s:?}"));
        let (p, q) = match s.trim().split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        Rational::new(p, q).map_err(|_| bad())
    }
}
