//! Complete enumeration of all solutions with a fixed number of terms.
//!
//! The search walks `n = 1..=max_n(k)` and extends increasing prefixes
//! `a_1 < ... < a_l`. Every quantity is an integer at the fixed scale `2^B`,
//! `B = ak_bound_thm(n, k)`, so the remainder `n/2^n - sum a_i/2^a_i` is a
//! plain `BigUint`. At each node the next term is confined to a short window:
//!
//! - below: `a/2^a` must be strictly smaller than the remainder (more terms
//!   follow), found by bisection since `a/2^a` is non-increasing;
//! - above: the best `m` terms starting at `a` must still reach the remainder
//!   (`tail_upper`), which is decreasing in `a`;
//! - the whole node dies when `m` terms under the current ceiling cannot get
//!   down to the remainder (`tail_lower`).
//!
//! The last slot is closed by inverting `a/2^a`. Once `a_1` is known the
//! ceiling tightens to the corollary bound `a^(k-1) 2^(a_1) >= 2^a`.
//!
//! Work is split at the top two levels (`n`, first free term) into
//! [`FrontierNode`]s that are explored independently and merged in order.

mod checkpoint;

use std::path::Path;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::bounds::{
    ak_bound_thm, corollary_ceiling, forced_prefix_len, max_n_u64, product_bound_holds,
};
use crate::exact_arith::{invert_term_all, verify_solution, DyadicRational, Solution};
use crate::{Error, Result};

pub use checkpoint::Checkpoint;

/// How often each pruning rule fired.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PruneCounters {
    /// Search nodes entered.
    pub nodes: u64,
    /// Candidates skipped because `a/2^a` already reaches the remainder.
    pub overshoot: u64,
    /// Candidate ranges cut because the best tail falls short of the remainder.
    pub tail_upper: u64,
    /// Nodes cut because the smallest tail under the ceiling exceeds the remainder.
    pub tail_lower: u64,
    /// Prefixes whose corollary ceiling was tighter than the `n`-aware bound.
    pub corollary_ceiling: u64,
    /// Values of `n` whose forced prefix already overshoots.
    pub forced_prefix: u64,
    /// Final slots whose remainder is not of the form `a/2^a`.
    pub no_inverse: u64,
    /// Final terms at or below the previous term, or above the ceiling.
    pub final_range: u64,
    /// Final terms failing `2^(a_k - a_(k-1)) | a_k`.
    pub divisibility: u64,
    /// Completed solutions rejected by the product bound post-filter.
    pub product_bound: u64,
}

impl PruneCounters {
    pub fn merge(&mut self, o: &PruneCounters) {
        self.nodes += o.nodes;
        self.overshoot += o.overshoot;
        self.tail_upper += o.tail_upper;
        self.tail_lower += o.tail_lower;
        self.corollary_ceiling += o.corollary_ceiling;
        self.forced_prefix += o.forced_prefix;
        self.no_inverse += o.no_inverse;
        self.final_range += o.final_range;
        self.divisibility += o.divisibility;
        self.product_bound += o.product_bound;
    }

    pub fn entries(&self) -> [(&'static str, u64); 10] {
        [
            ("nodes", self.nodes),
            ("overshoot", self.overshoot),
            ("tail_upper", self.tail_upper),
            ("tail_lower", self.tail_lower),
            ("corollary_ceiling", self.corollary_ceiling),
            ("forced_prefix", self.forced_prefix),
            ("no_inverse", self.no_inverse),
            ("final_range", self.final_range),
            ("divisibility", self.divisibility),
            ("product_bound", self.product_bound),
        ]
    }

    pub(crate) fn set(&mut self, name: &str, v: u64) -> bool {
        let slot = match name {
            "nodes" => &mut self.nodes,
            "overshoot" => &mut self.overshoot,
            "tail_upper" => &mut self.tail_upper,
            "tail_lower" => &mut self.tail_lower,
            "corollary_ceiling" => &mut self.corollary_ceiling,
            "forced_prefix" => &mut self.forced_prefix,
            "no_inverse" => &mut self.no_inverse,
            "final_range" => &mut self.final_range,
            "divisibility" => &mut self.divisibility,
            "product_bound" => &mut self.product_bound,
            _ => return false,
        };
        *slot = v;
        true
    }
}

/// A unit of parallel work: `n` plus a fixed prefix of terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrontierNode {
    pub n: u64,
    pub prefix: Vec<u64>,
}

/// Result of a full enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub k: u64,
    pub solutions: Vec<Solution>,
    pub counters: PruneCounters,
}

/// `sum_{i<m} (b+i)/2^(b+i)`, the largest sum of `m` increasing terms that
/// are all at least `b`.
pub fn tail_upper(b: u64, m: u64) -> DyadicRational {
    assert!(b >= 1 && m >= 1);
    DyadicRational::new(tail_upper_num(b, m), b - 1 + m)
}

/// Numerator of [`tail_upper`] over `2^(b-1+m)`:
/// `(2^m - 1)(b-1) + 2^(m+1) - m - 2`.
fn tail_upper_num(b: u64, m: u64) -> BigUint {
    let pm = BigUint::one() << m;
    (&pm - 1u32) * (b - 1) + (pm << 1u32) - (m + 2)
}

/// `sum_{i<m} (a_max-i)/2^(a_max-i)`, the smallest sum of `m` increasing
/// terms that are all at most `a_max`.
pub fn tail_lower(m: u64, a_max: u64) -> Result<DyadicRational> {
    if m == 0 || a_max < m + 2 {
        return Err(Error::Precondition(format!(
            "tail_lower needs a_max - m + 1 >= 3 (m = {m}, a_max = {a_max})"
        )));
    }
    let mut num = BigUint::zero();
    for i in 0..m {
        num += BigUint::from(a_max - i) << i;
    }
    Ok(DyadicRational::new(num, a_max))
}

/// Per-`n` search state shared by all nodes with that `n`.
struct Search {
    k: u64,
    n: u64,
    /// Scale exponent; every value below is multiplied by `2^scale`.
    scale: u64,
    ak_max: u64,
}

impl Search {
    fn new(n: u64, k: u64) -> Self {
        let ak_max = ak_bound_thm(n, k);
        Self {
            k,
            n,
            scale: ak_max,
            ak_max,
        }
    }

    /// `a/2^a * 2^scale`, for `a <= scale`.
    fn value(&self, a: u64) -> BigUint {
        BigUint::from(a) << (self.scale - a)
    }

    fn target(&self) -> BigUint {
        self.value(self.n)
    }

    fn ceiling(&self, prefix: &[u64], c: &mut PruneCounters) -> u64 {
        match prefix.first() {
            None => self.ak_max,
            Some(&a1) => {
                let cor = corollary_ceiling(a1, self.k);
                if cor < self.ak_max {
                    c.corollary_ceiling += 1;
                    cor
                } else {
                    self.ak_max
                }
            }
        }
    }

    /// Candidates for slot `prefix.len() + 1`, each paired with its remainder.
    fn candidates(
        &self,
        prefix: &[u64],
        rem: &BigUint,
        c: &mut PruneCounters,
    ) -> Vec<(u64, BigUint)> {
        let m = self.k - prefix.len() as u64;
        debug_assert!(m >= 2);
        let ceiling = self.ceiling(prefix, c);
        let lo = prefix.last().map_or(self.n + 1, |&a| a + 1);
        let mut hi = ceiling.saturating_sub(m - 1);
        if prefix.is_empty() {
            hi = hi.min(self.n + 3);
        }
        let mut out = Vec::new();
        if lo > hi {
            c.tail_lower += 1;
            return out;
        }
        // The m terms closest to the ceiling are the smallest possible.
        let floor = tail_upper_num(ceiling - m + 1, m) << (self.scale - ceiling);
        if *rem < floor {
            c.tail_lower += 1;
            return out;
        }
        // First a in [lo, hi] with value(a) < rem.
        let start = if self.value(lo) < *rem {
            lo
        } else if self.value(hi) >= *rem {
            c.overshoot += hi - lo + 1;
            return out;
        } else {
            let (mut bad, mut good) = (lo, hi);
            while good - bad > 1 {
                let mid = bad + (good - bad) / 2;
                if self.value(mid) < *rem {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            good
        };
        c.overshoot += start - lo;
        for a in start..=hi {
            let best = tail_upper_num(a, m) << (self.scale - (a - 1 + m));
            if best < *rem {
                c.tail_upper += 1;
                break;
            }
            out.push((a, rem - self.value(a)));
        }
        out
    }

    fn close(&self, prefix: &[u64], rem: &BigUint, c: &mut PruneCounters, out: &mut Vec<Solution>) {
        let last = *prefix.last().expect("k >= 2");
        let ceiling = self.ceiling(prefix, c);
        let r = DyadicRational::new(rem.clone(), self.scale);
        let preimages = invert_term_all(&r);
        if preimages.is_empty() {
            c.no_inverse += 1;
            return;
        }
        for a in preimages {
            if a <= last || a > ceiling {
                c.final_range += 1;
                continue;
            }
            if a.trailing_zeros() < (a - last).min(64) as u32 {
                c.divisibility += 1;
                continue;
            }
            let mut terms = prefix.to_vec();
            terms.push(a);
            let s = Solution::new(self.n, terms).expect("search keeps terms increasing");
            if !product_bound_holds(&s) {
                c.product_bound += 1;
                continue;
            }
            debug_assert!(verify_solution(&s));
            out.push(s);
        }
    }

    fn dfs(
        &self,
        prefix: &mut Vec<u64>,
        rem: &BigUint,
        c: &mut PruneCounters,
        out: &mut Vec<Solution>,
    ) {
        c.nodes += 1;
        if self.k - prefix.len() as u64 == 1 {
            self.close(prefix, rem, c, out);
            return;
        }
        for (a, next) in self.candidates(prefix, rem, c) {
            prefix.push(a);
            self.dfs(prefix, &next, c, out);
            prefix.pop();
        }
    }

    /// Remainder after `prefix`, or `None` if it is not strictly positive.
    fn remainder(&self, prefix: &[u64]) -> Option<BigUint> {
        let mut rem = self.target();
        for &a in prefix {
            if a > self.scale {
                return None;
            }
            let v = self.value(a);
            if v >= rem {
                return None;
            }
            rem -= v;
        }
        Some(rem)
    }
}

fn check_k(k: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::TooFewTerms(k));
    }
    // max_n must fit a machine word and the scale must stay addressable.
    if k > 40 {
        return Err(Error::Precondition(format!(
            "k = {k} is beyond enumerable range"
        )));
    }
    Ok(())
}

/// The top two levels of the search tree, in `(n, prefix)` order.
pub fn frontier(k: u64) -> Result<(Vec<FrontierNode>, PruneCounters)> {
    check_k(k)?;
    let mut c = PruneCounters::default();
    let mut nodes = Vec::new();
    for n in 1..=max_n_u64(k)? {
        let search = Search::new(n, k);
        let prefix: Vec<u64> = (1..=forced_prefix_len(n, k)).map(|i| n + i).collect();
        let Some(rem) = search.remainder(&prefix) else {
            c.forced_prefix += 1;
            continue;
        };
        if prefix.len() as u64 + 1 == k {
            nodes.push(FrontierNode { n, prefix });
            continue;
        }
        c.nodes += 1;
        for (a, _) in search.candidates(&prefix, &rem, &mut c) {
            let mut p = prefix.clone();
            p.push(a);
            nodes.push(FrontierNode { n, prefix: p });
        }
    }
    Ok((nodes, c))
}

/// All solutions below one frontier node.
pub fn explore(k: u64, node: &FrontierNode) -> Result<(Vec<Solution>, PruneCounters)> {
    check_k(k)?;
    let search = Search::new(node.n, k);
    let mut c = PruneCounters::default();
    let mut out = Vec::new();
    if node.prefix.len() as u64 >= k {
        return Err(Error::Precondition(
            "frontier prefix is already complete".into(),
        ));
    }
    if let Some(rem) = search.remainder(&node.prefix) {
        let mut prefix = node.prefix.clone();
        search.dfs(&mut prefix, &rem, &mut c, &mut out);
    }
    Ok((out, c))
}

/// Explores `nodes` on `jobs` workers; output order follows `nodes`.
pub fn explore_all(
    k: u64,
    nodes: &[FrontierNode],
    jobs: usize,
) -> Result<(Vec<Solution>, PruneCounters)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let parts: Vec<_> = pool.install(|| {
        nodes
            .par_iter()
            .map(|node| explore(k, node))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut sols = Vec::new();
    let mut c = PruneCounters::default();
    for (s, pc) in parts {
        sols.extend(s);
        c.merge(&pc);
    }
    Ok((sols, c))
}

/// Full enumeration on `jobs` workers.
pub fn enumerate_with_jobs(k: u64, jobs: usize) -> Result<Enumeration> {
    let (nodes, mut counters) = frontier(k)?;
    let (mut solutions, c) = explore_all(k, &nodes, jobs)?;
    counters.merge(&c);
    solutions.sort();
    Ok(Enumeration {
        k,
        solutions,
        counters,
    })
}

/// Worker count used when none is given: the available parallelism.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Every solution with exactly `k` terms, sorted by `(n, a_1, ..., a_k)`.
pub fn enumerate_solutions(k: u64) -> Result<Vec<Solution>> {
    Ok(enumerate_with_jobs(k, default_jobs())?.solutions)
}

pub fn count_solutions(k: u64) -> Result<usize> {
    Ok(enumerate_solutions(k)?.len())
}

/// Enumeration that persists its frontier to `path` after every batch and
/// resumes from it when the file already exists.
///
/// `progress` receives `(nodes done, nodes total)` after each batch.
pub fn enumerate_checkpointed(
    k: u64,
    jobs: usize,
    path: &Path,
    mut progress: impl FnMut(usize, usize),
) -> Result<Enumeration> {
    let mut state = if path.exists() {
        let cp = Checkpoint::load(path)?;
        if cp.k != k {
            return Err(Error::Checkpoint {
                line: 0,
                reason: format!("checkpoint is for k = {}, not {k}", cp.k),
            });
        }
        cp
    } else {
        let (pending, counters) = frontier(k)?;
        let cp = Checkpoint {
            k,
            total: pending.len(),
            pending,
            solutions: Vec::new(),
            counters,
        };
        cp.save(path)?;
        cp
    };
    let batch = (jobs.max(1) * 4).max(16);
    while !state.pending.is_empty() {
        let take = batch.min(state.pending.len());
        let (sols, c) = explore_all(k, &state.pending[..take], jobs)?;
        state.pending.drain(..take);
        state.solutions.extend(sols);
        state.counters.merge(&c);
        state.save(path)?;
        progress(state.total - state.pending.len(), state.total);
    }
    let mut solutions = state.solutions;
    solutions.sort();
    solutions.dedup();
    Ok(Enumeration {
        k,
        solutions,
        counters: state.counters,
    })
}

/// Remainder helper exposed for diagnostics: `n/2^n - sum prefix` as a dyadic.
pub fn prefix_remainder(n: u64, prefix: &[u64]) -> Option<DyadicRational> {
    let k = prefix.len() as u64 + 1;
    let search = Search::new(n, k.max(2));
    let rem = search.remainder(prefix)?;
    Some(DyadicRational::new(rem, search.scale))
}
