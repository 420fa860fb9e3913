//! Numbers with several representations: arithmetic-progression tails and
//! chains of greedy expansions.
//!
//! A chain starts from a single term `a/2^a`, expands it greedily into
//! `a_1/2^(a_1) + ... + a_k/2^(a_k)`, then expands the last of those terms
//! again, and so on. Every prefix of the chain is another representation of
//! the original value.

use num_bigint::BigInt;
use num_traits::One;
use sha2::{Digest, Sha256};

use crate::exact_arith::{verify_solution, Rational, Solution};
use crate::greedy::run_for_n;
use crate::{Error, Result};

/// `sum_(i>=1) (p i + q) / 2^(p i + q) = ((q + p) 2^p - q) / (2^q (2^p - 1)^2)`.
pub fn tail_sum(p: u64, q: u64) -> Result<Rational> {
    if p == 0 || q == 0 {
        return Err(Error::Precondition("p and q must be positive".into()));
    }
    let two_p = BigInt::one() << p;
    let num = BigInt::from(q + p) * &two_p - q;
    let m = two_p - 1;
    let den = (BigInt::one() << q) * &m * &m;
    Rational::new(num, den)
}

/// Three ways to write 1/2 with small exponents.
pub const HALF_PREFIXES: [&[u64]; 3] = [&[3, 6, 8], &[4, 5, 6], &[4, 5, 7, 8, 11, 13, 14]];

/// Smallest `p + q` accepted by [`three_representations`].
pub const MIN_TAIL_START: u64 = 17;

/// One prefix followed by the infinite progression `p i + q`, `i >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub prefix: Vec<u64>,
    pub p: u64,
    pub q: u64,
}

impl Representation {
    /// Exact value: prefix sum plus `tail_sum(p, q)`.
    pub fn value(&self) -> Result<Rational> {
        let mut v = tail_sum(self.p, self.q)?;
        for &a in &self.prefix {
            v = &v + &Rational::new(a, BigInt::one() << a)?;
        }
        Ok(v)
    }

    /// Prefix plus the first `n` progression terms.
    pub fn truncated(&self, n: u64) -> Vec<u64> {
        let mut out = self.prefix.clone();
        out.extend((1..=n).map(|i| self.p * i + self.q));
        out
    }
}

/// The three representations of `1/2 + tail_sum(p, q)`.
pub fn three_representations(p: u64, q: u64) -> Result<[Representation; 3]> {
    if p == 0 || q == 0 || p + q < MIN_TAIL_START {
        return Err(Error::Precondition(format!(
            "need p, q >= 1 and p + q >= {MIN_TAIL_START}, got p = {p}, q = {q}"
        )));
    }
    Ok(HALF_PREFIXES.map(|prefix| Representation {
        prefix: prefix.to_vec(),
        p,
        q,
    }))
}

/// SHA-256 of the decimal terms joined by commas, hex encoded.
pub fn terms_digest(terms: &[u64]) -> String {
    let mut h = Sha256::new();
    for (i, t) in terms.iter().enumerate() {
        if i > 0 {
            h.update(b",");
        }
        h.update(t.to_string().as_bytes());
    }
    hex::encode(h.finalize())
}

/// Steps up to this index keep their full term lists by default.
pub const KEEP_TERMS_THROUGH: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStep {
    /// 1-based position in the chain.
    pub index: usize,
    /// The exponent `a` whose term `a/2^a` this step expands.
    pub source: u64,
    pub k: usize,
    pub last_term: u64,
    pub first_term: u64,
    pub digest: String,
    /// Dropped for long steps; regenerate from `source`.
    pub terms: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub a_start: u64,
    pub steps: Vec<ChainStep>,
    /// Index of the step whose expansion ran past the term budget.
    pub exhausted_at: Option<usize>,
}

impl Chain {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }
}

/// Expands `a_start/2^(a_start)` greedily, then the last term of each
/// expansion in turn, for `depth` steps or until an expansion needs more than
/// `max_k` terms. `sink` sees every step with its full term list.
pub fn expand_chain_with(
    a_start: u64,
    depth: usize,
    max_k: usize,
    keep_terms_through: usize,
    mut sink: impl FnMut(&ChainStep, &[u64]) -> Result<()>,
) -> Result<Chain> {
    if a_start < 3 {
        return Err(Error::Precondition(format!(
            "chain start must be at least 3, got {a_start}"
        )));
    }
    let mut chain = Chain {
        a_start,
        steps: Vec::new(),
        exhausted_at: None,
    };
    let mut source = a_start;
    for index in 1..=depth {
        let run = run_for_n(source, max_k)?;
        if !run.terminated {
            chain.exhausted_at = Some(index);
            break;
        }
        if !run.feasible {
            return Err(Error::ChainInconsistent {
                step: index,
                reason: "greedy state left the feasible region",
            });
        }
        let terms = run.terms;
        let step = ChainStep {
            index,
            source,
            k: terms.len(),
            last_term: *terms.last().expect("terminated run is nonempty"),
            first_term: terms[0],
            digest: terms_digest(&terms),
            terms: None,
        };
        sink(&step, &terms)?;
        source = step.last_term;
        chain.steps.push(ChainStep {
            terms: (index <= keep_terms_through).then_some(terms),
            ..step
        });
    }
    Ok(chain)
}

pub fn expand_chain(a_start: u64, depth: usize, max_k: usize) -> Result<Chain> {
    expand_chain_with(a_start, depth, max_k, KEEP_TERMS_THROUGH, |_, _| Ok(()))
}

fn inconsistent(step: usize, reason: &'static str) -> Error {
    Error::ChainInconsistent { step, reason }
}

/// Checks every step (sources link up, expansions start above their source
/// and sum exactly to it, digests match, regenerating elided lists) and
/// returns the number of representations: one per step plus the start term.
pub fn representation_count_certificate(chain: &Chain) -> Result<u64> {
    let mut source = chain.a_start;
    for step in &chain.steps {
        let i = step.index;
        if step.source != source {
            return Err(inconsistent(i, "source is not the previous last term"));
        }
        let regenerated;
        let terms = match &step.terms {
            Some(t) => t,
            None => {
                let run = run_for_n(source, step.k)?;
                if !run.terminated {
                    return Err(inconsistent(i, "expansion does not fit its term count"));
                }
                regenerated = run.terms;
                &regenerated
            }
        };
        if terms.len() != step.k
            || terms.first() != Some(&step.first_term)
            || terms.last() != Some(&step.last_term)
        {
            return Err(inconsistent(i, "term list disagrees with its summary"));
        }
        if step.first_term <= source {
            return Err(inconsistent(i, "expansion does not start above its source"));
        }
        if terms_digest(terms) != step.digest {
            return Err(inconsistent(i, "digest mismatch"));
        }
        let sol = Solution::new(source, terms.clone())
            .map_err(|_| inconsistent(i, "terms are not strictly increasing"))?;
        if !verify_solution(&sol) {
            return Err(inconsistent(i, "expansion does not sum to its source term"));
        }
        source = step.last_term;
    }
    Ok(chain.steps.len() as u64 + 1)
}
