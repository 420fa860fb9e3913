//! Greedy expansion through the integerized sequence `S(x)`.
//!
//! For `0 < x < 2` let `k0` be the least `k >= 1` with `k/2^k < x`. Starting
//! from `x_(k0) = x * 2^(k0-1)`,
//!
//! ```text
//! x_(i+1) = 2 x_i - i   if that is >= 0   (term i is taken)
//!         = 2 x_i       otherwise
//! ```
//!
//! and `x_i / 2^(i-1)` is exactly what is left of `x` after the terms below
//! `i`. The sequence terminates when some `x_i` reaches zero. For
//! `x = n/2^n` every `x_i` is an integer below `i + 1`, so the whole run is
//! machine-word arithmetic.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::exact_arith::{sum_equals, Rational, Solution};
use crate::{Error, Result};

/// Default term budget for single queries.
pub const DEFAULT_MAX_K: usize = 1 << 20;

/// One point `(i, x_i)` of `S(x)` plus the indices taken so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyState {
    pub i: u64,
    pub x: Rational,
    pub emitted: Vec<u64>,
}

impl GreedyState {
    /// `(k0, x * 2^(k0-1))` with nothing emitted.
    pub fn start(x: &Rational) -> Result<Self> {
        let k0 = k_zero(x)?;
        Ok(Self {
            i: k0,
            x: x.mul_pow2(k0 - 1),
            emitted: Vec::new(),
        })
    }

    pub fn is_terminated(&self) -> bool {
        self.x.is_zero()
    }
}

fn check_range(x: &Rational) -> Result<()> {
    if !x.is_positive() || *x >= Rational::from_integer(2) {
        return Err(Error::OutOfRange);
    }
    Ok(())
}

/// The least `k >= 1` with `k / 2^k < x` (strict).
pub fn k_zero(x: &Rational) -> Result<u64> {
    check_range(x)?;
    let num = x.numer();
    let den = x.denom();
    let mut k = 1u64;
    // k < x 2^k  <=>  k * den < num * 2^k
    while BigInt::from(k) * den >= num << k {
        k += 1;
    }
    Ok(k)
}

/// One step of `S(x)`.
pub fn advance(mut state: GreedyState) -> GreedyState {
    debug_assert!(state.x.is_positive());
    let doubled = state.x.mul_pow2(1);
    let taken = &doubled - &Rational::from_integer(state.i);
    if taken.is_positive() || taken.is_zero() {
        state.emitted.push(state.i);
        state.x = taken;
    } else {
        state.x = doubled;
    }
    state.i += 1;
    state
}

/// Result of running `S(x)` under a term budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyRun {
    /// Indices taken; the full representation when `terminated`.
    pub terms: Vec<u64>,
    pub terminated: bool,
    /// Whether `x_i < i + 1` held at every step.
    pub feasible: bool,
    /// Index after the last step performed.
    pub end_index: u64,
}

/// Integer core of `S(x)` once `x_i = X / d` with a fixed odd `d`: `X` is
/// an integer and `2X - i d` decides each step.
trait Numerator: Sized {
    fn is_zero(&self) -> bool;
    /// `2X - i d` if non-negative.
    fn take(&self, i: u64, d: &Self) -> Option<Self>;
    fn double(&self) -> Self;
    /// `X < (i + 1) d`
    fn feasible(&self, i: u64, d: &Self) -> bool;
}

impl Numerator for u128 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn take(&self, i: u64, d: &Self) -> Option<Self> {
        (2 * self).checked_sub(u128::from(i) * d)
    }
    fn double(&self) -> Self {
        2 * self
    }
    fn feasible(&self, i: u64, d: &Self) -> bool {
        *self < (u128::from(i) + 1) * d
    }
}

impl Numerator for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn take(&self, i: u64, d: &Self) -> Option<Self> {
        let t: BigInt = self * 2 - d * BigInt::from(i);
        (!t.is_negative()).then_some(t)
    }
    fn double(&self) -> Self {
        self * 2
    }
    fn feasible(&self, i: u64, d: &Self) -> bool {
        *self < d * BigInt::from(i + 1)
    }
}

fn run_integer<N: Numerator>(
    mut x: N,
    d: N,
    mut i: u64,
    mut terms: Vec<u64>,
    mut feasible: bool,
    max_k: usize,
) -> GreedyRun {
    loop {
        if x.is_zero() {
            return GreedyRun {
                terms,
                terminated: true,
                feasible,
                end_index: i,
            };
        }
        feasible &= x.feasible(i, &d);
        match x.take(i, &d) {
            Some(t) => {
                if terms.len() == max_k {
                    return GreedyRun {
                        terms,
                        terminated: false,
                        feasible,
                        end_index: i,
                    };
                }
                terms.push(i);
                x = t;
            }
            None => x = x.double(),
        }
        i += 1;
    }
}

/// Runs `S(x)` for any rational `0 < x < 2`.
///
/// The first steps, while `x_i` still carries powers of two in its
/// denominator, use exact rationals; after that the numerator over the odd
/// part of the denominator is an integer and the loop switches to integers.
pub fn run(x: &Rational, max_k: usize) -> Result<GreedyRun> {
    let mut state = GreedyState::start(x)?;
    let den = x.denom();
    let twos = den.trailing_zeros().unwrap_or(0);
    let odd: BigInt = den >> twos;
    let mut feasible = true;
    while state.i - 1 < twos && !state.is_terminated() {
        feasible &= state.x < Rational::from_integer(state.i + 1);
        let before = state.emitted.len();
        let next = advance(state.clone());
        if next.emitted.len() > before && before == max_k {
            return Ok(GreedyRun {
                terms: state.emitted,
                terminated: false,
                feasible,
                end_index: state.i,
            });
        }
        state = next;
    }
    // x_i * odd is now an integer.
    let scaled = state.x.inner() * num_rational::BigRational::from_integer(odd.clone());
    debug_assert!(scaled.is_integer());
    let xnum = scaled.to_integer();
    let small = odd.bits() <= 32 && xnum.bits() <= 64;
    let out = if small {
        run_integer(
            xnum.to_u128().expect("fits"),
            odd.to_u128().expect("fits"),
            state.i,
            state.emitted,
            feasible,
            max_k,
        )
    } else {
        run_integer(xnum, odd, state.i, state.emitted, feasible, max_k)
    };
    Ok(out)
}

/// The greedy representation of `x` using at most `max_k` terms, or `None`
/// when the budget runs out first. A `None` says nothing about whether a
/// representation exists.
pub fn greedy_representation(x: &Rational, max_k: usize) -> Result<Option<Vec<u64>>> {
    let r = run(x, max_k)?;
    if !r.terminated {
        return Ok(None);
    }
    let ok = x.to_dyadic().is_some_and(|d| sum_equals(&d, &r.terms));
    if !ok {
        return Err(Error::Verification("greedy terms do not sum to x"));
    }
    Ok(Some(r.terms))
}

/// `S(n/2^n)` on machine words: `k0 = n + 1` and `x_(n+1) = n`.
pub fn run_for_n(n: u64, max_k: usize) -> Result<GreedyRun> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "n must be at least 2, got {n}"
        )));
    }
    let mut x = n;
    let mut i = n + 1;
    let mut terms = Vec::new();
    let mut feasible = true;
    while x != 0 {
        feasible &= x <= i;
        let doubled = x.checked_mul(2).ok_or(Error::Overflow)?;
        if doubled >= i {
            if terms.len() == max_k {
                return Ok(GreedyRun {
                    terms,
                    terminated: false,
                    feasible,
                    end_index: i,
                });
            }
            terms.push(i);
            x = doubled - i;
        } else {
            x = doubled;
        }
        i += 1;
    }
    Ok(GreedyRun {
        terms,
        terminated: true,
        feasible,
        end_index: i,
    })
}

/// A terminated greedy run for `n/2^n`, packaged as a solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NRepresentation {
    pub k: usize,
    pub solution: Solution,
}

/// Greedy representation of `n/2^n`, verified exactly before it is returned.
pub fn greedy_for_n(n: u64, max_k: usize) -> Result<Option<NRepresentation>> {
    let r = run_for_n(n, max_k)?;
    if !r.terminated {
        return Ok(None);
    }
    let solution = Solution::new(n, r.terms)?;
    if !crate::exact_arith::verify_solution(&solution) {
        return Err(Error::Verification("greedy terms do not sum to n/2^n"));
    }
    Ok(Some(NRepresentation {
        k: solution.k(),
        solution,
    }))
}

/// Per-`n` statistics for bulk sweeps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub n: u64,
    /// Number of terms, or terms emitted before the budget ran out.
    pub k: u64,
    /// Last term, or the index reached when the budget ran out.
    pub a_k: u64,
    pub terminated: bool,
    pub feasible: bool,
    /// `a_1 = n + 1`.
    pub first_is_next: bool,
}

impl SweepRow {
    /// `k + n <= a_k <= 2(k + n)`.
    pub fn in_window(&self) -> bool {
        let s = self.k + self.n;
        s <= self.a_k && self.a_k <= 2 * s
    }

    pub fn ak_ratio(&self) -> f64 {
        self.a_k as f64 / (2.0 * (self.k + self.n) as f64)
    }

    pub fn k_over_n(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

pub fn sweep_row(n: u64, max_k: usize) -> Result<SweepRow> {
    let r = run_for_n(n, max_k)?;
    let a_k = if r.terminated {
        *r.terms.last().expect("terminated run has terms")
    } else {
        r.end_index
    };
    Ok(SweepRow {
        n,
        k: r.terms.len() as u64,
        a_k,
        terminated: r.terminated,
        feasible: r.feasible,
        first_is_next: r.terms.first() == Some(&(n + 1)),
    })
}

/// Sweep over `n_min..=n_max` on `jobs` workers, rows in ascending `n`.
pub fn sweep(n_min: u64, n_max: u64, max_k: usize, jobs: usize) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;
    if n_min < 2 || n_min > n_max {
        return Err(Error::Precondition(format!(
            "sweep needs 2 <= n_min <= n_max, got {n_min}..{n_max}"
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(e.to_string()))?;
    pool.install(|| {
        (n_min..=n_max)
            .into_par_iter()
            .map(|n| sweep_row(n, max_k))
            .collect()
    })
}
