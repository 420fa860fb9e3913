//! Exact arithmetic for the terms `a / 2^a`.
//!
//! Everything here is pure and allocation-light; the search and greedy
//! modules build on [`DyadicRational`] and the streaming checker
//! [`sum_equals`].

mod dyadic;
mod rational;
mod solution;

use num_bigint::BigUint;
use num_traits::Zero;

pub use dyadic::DyadicRational;
pub use rational::Rational;
pub use solution::Solution;

use crate::{Error, Result};

/// `a / 2^a` in lowest terms.
pub fn term_value(a: u64) -> Result<DyadicRational> {
    if a == 0 {
        return Err(Error::ZeroTerm);
    }
    Ok(DyadicRational::new(a, a))
}

pub fn dy_add(x: &DyadicRational, y: &DyadicRational) -> DyadicRational {
    x + y
}

/// `x - y`, or [`Error::Underflow`] when `y > x`.
pub fn dy_sub(x: &DyadicRational, y: &DyadicRational) -> Result<DyadicRational> {
    x.checked_sub(y)
}

/// Every `a >= 1` with `a / 2^a = r`, ascending.
///
/// Writing `r = p / 2^e` with `p` odd, a match needs `a = p * 2^v` and
/// `p * 2^v - v = e`. The left side grows with `v`, so the scan stops as soon
/// as it passes `e`. Only `r = 1/2` has two preimages (1 and 2).
pub fn invert_term_all(r: &DyadicRational) -> Vec<u64> {
    let mut out = Vec::new();
    if r.is_zero() {
        return out;
    }
    let Some(p) = u64::try_from(r.num()).ok() else {
        return out;
    };
    let e = r.exp();
    if r.exp() == 0 {
        // Integers are never of the form a/2^a with a >= 1.
        return out;
    }
    let mut v = 0u32;
    while let Some(a) = p.checked_shl(v).filter(|a| a >> v == p) {
        let lhs = a - u64::from(v);
        if lhs > e {
            break;
        }
        if lhs == e {
            out.push(a);
        }
        v += 1;
    }
    out
}

/// The smallest `a` with `a / 2^a = r`, if any.
pub fn invert_term(r: &DyadicRational) -> Option<u64> {
    invert_term_all(r).into_iter().next()
}

/// Exact test of `x = sum a / 2^a` over `terms`, which must be strictly
/// increasing and positive.
///
/// Walks the terms carrying the scaled remainder `(x - partial) * 2^c`, where
/// `c` is the larger of the exponent of `x` and the current term. Once `c`
/// tracks the terms the remainder is bounded by `a + 2`, so the cost is linear
/// in the number of terms; anything above that bound is rejected immediately.
pub fn sum_equals(x: &DyadicRational, terms: &[u64]) -> bool {
    let mut rem = x.num().clone();
    let mut c = x.exp();
    let mut prev = 0u64;
    for &a in terms {
        if a <= prev || rem.is_zero() {
            return false;
        }
        prev = a;
        let sub = if a >= c {
            rem <<= a - c;
            c = a;
            BigUint::from(a)
        } else {
            BigUint::from(a) << (c - a)
        };
        if rem < sub {
            return false;
        }
        rem -= sub;
        // The remaining terms exceed a, so together they stay below (a+2)/2^a.
        if c == a && rem > BigUint::from(a) + 2u32 {
            return false;
        }
    }
    rem.is_zero()
}

/// Whether `s` satisfies `n/2^n = sum a_i/2^a_i` exactly.
///
/// Same walk as [`sum_equals`], with exponents measured from `n` so that
/// arbitrarily large `n` costs no more than its own bit length per step.
pub fn verify_solution(s: &Solution) -> bool {
    let n = s.n();
    let mut rem = n.clone();
    let mut c = 0u64;
    for &d in s.offsets() {
        if rem.is_zero() {
            return false;
        }
        rem <<= d - c;
        c = d;
        let a = n + d;
        if rem < a {
            return false;
        }
        rem -= &a;
        if rem > a + 2u32 {
            return false;
        }
    }
    rem.is_zero()
}
