//! Closed-form constraints on solutions.
//!
//! Logarithms never touch floating point: `B >= 2n + 2k log2 k` is decided as
//! `2^(B - 2n) >= k^(2k)` on big integers.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::exact_arith::Solution;
use crate::{Error, Result};

fn check_k(k: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::TooFewTerms(k));
    }
    Ok(())
}

/// Largest `n` for which `k` terms can work: `2^(k+1) - k - 2`.
pub fn max_n(k: u64) -> Result<BigUint> {
    check_k(k)?;
    Ok((BigUint::one() << (k + 1)) - (k + 2))
}

/// [`max_n`] as a machine word, for `k <= 61`.
pub fn max_n_u64(k: u64) -> Result<u64> {
    max_n(k)?.to_u64().ok_or(Error::Overflow)
}

/// `(n, (n+1, ..., n+k))` with `n = max_n(k)`, which always balances.
pub fn trivial_solution(k: u64) -> Result<Solution> {
    let n = max_n(k)?;
    Solution::from_offsets(n, (1..=k).collect())
}

/// Largest `j` in `1..k` with `n >= 2^(j+1) - j`, or 0 when none qualifies.
/// Such solutions must start with `n+1, ..., n+j`.
pub fn forced_prefix_len(n: u64, k: u64) -> u64 {
    let n = u128::from(n);
    let mut j = 0u64;
    // 2^(j+1) - j exceeds any u64 once j reaches 64.
    while j + 1 < k && j + 1 < 64 && n >= (1u128 << (j + 2)) - u128::from(j + 1) {
        j += 1;
    }
    j
}

/// `ceil(2k log2 k)`: the least `t` with `2^t >= k^(2k)`.
pub fn two_k_log2_k_ceil(k: u64) -> u64 {
    let p = BigUint::from(k).pow((2 * k) as u32);
    let bits = p.bits();
    if p.count_ones() == 1 {
        bits - 1
    } else {
        bits
    }
}

/// Least integer `>= 2n + 2k log2 k`, a ceiling on `a_k` for any solution.
pub fn ak_bound_thm(n: u64, k: u64) -> u64 {
    2 * n + two_k_log2_k_ceil(k)
}

/// Least integer `>= 2^(k+2) + 2k(log2 k - 1) - 4`, the `n`-free ceiling on `a_k`.
pub fn ak_bound_cor(k: u64) -> Result<u64> {
    check_k(k)?;
    let head = 1u64
        .checked_shl(k as u32 + 2)
        .filter(|_| k + 2 < 64)
        .ok_or(Error::Overflow)?;
    Ok(head - 2 * k - 4 + two_k_log2_k_ceil(k))
}

/// The divisibility `2^(a_k - a_(k-1)) | a_k` together with
/// `2^(a_k - a_i) <= (a_(i+2) ... a_k) * a_k` for `1 <= i <= k-2`.
pub fn product_bound_holds(s: &Solution) -> bool {
    let d = s.offsets();
    let k = d.len();
    let ak = s.last();
    let top_gap = d[k - 1] - d[k - 2];
    if ak.trailing_zeros().unwrap_or(0) < top_gap {
        return false;
    }
    // Walk i downward so the product grows one factor per step.
    let mut product = &ak * &ak;
    for i in (0..k - 2).rev() {
        if i + 2 < k - 1 {
            product *= s.term(i + 2);
        }
        let gap = d[k - 1] - d[i];
        if !pow2_le(gap, &product) {
            return false;
        }
    }
    true
}

/// `a_k^(k-1) * 2^(a_1) >= 2^(a_k)`.
pub fn corollary_bound_holds(s: &Solution) -> bool {
    let d = s.offsets();
    let k = d.len();
    let gap = d[k - 1] - d[0];
    let lhs = s.last().pow((k - 1) as u32);
    pow2_le(gap, &lhs)
}

/// `2^e <= x`.
pub(crate) fn pow2_le(e: u64, x: &BigUint) -> bool {
    x.bits() > e
}

/// Largest `a >= a1` with `a^(k-1) * 2^(a1) >= 2^a`, i.e. the tightest `a_k`
/// ceiling the corollary bound allows once `a_1` is fixed.
pub fn corollary_ceiling(a1: u64, k: u64) -> u64 {
    let holds = |a: u64| pow2_le(a - a1, &BigUint::from(a).pow((k - 1) as u32));
    // a^(k-1) / 2^a decreases once a > (k-1)/ln 2, so past 2k the
    // admissible set is a prefix and can be bisected.
    let start = a1.max(2 * k);
    if !holds(start) {
        let mut a = start;
        while a > a1 && !holds(a) {
            a -= 1;
        }
        return a;
    }
    let mut lo = start;
    let mut step = 1u64;
    let mut hi = start + step;
    while holds(hi) {
        lo = hi;
        step *= 2;
        hi = start + step;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// The admissible region for a fixed `(n, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBox {
    pub n: u64,
    pub k: u64,
    pub a1_min: u64,
    pub a1_max: u64,
    pub forced_prefix: Vec<u64>,
    pub ak_max: u64,
}

impl SearchBox {
    pub fn new(n: u64, k: u64) -> Result<Self> {
        check_k(k)?;
        if n == 0 {
            return Err(Error::Precondition("n must be positive".into()));
        }
        let j = forced_prefix_len(n, k);
        Ok(Self {
            n,
            k,
            a1_min: n + 1,
            a1_max: n + 3,
            forced_prefix: (1..=j).map(|i| n + i).collect(),
            ak_max: ak_bound_thm(n, k),
        })
    }
}
