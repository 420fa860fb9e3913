//! Line-oriented checkpoint for long enumerations.
//!
//! ```text
//! # egeq enumerate checkpoint
//! #k=7
//! #total=812
//! #solution=1;4,5,7,8,11,13,14
//! #counter=nodes:10423
//! 12;13,15
//! 12;13,16
//! ```
//!
//! Bare lines are pending frontier nodes `n;a1,...,al`. Lines starting with
//! `#` carry metadata; unknown `#` lines are comments.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{FrontierNode, PruneCounters};
use crate::exact_arith::Solution;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub k: u64,
    pub total: usize,
    pub pending: Vec<FrontierNode>,
    pub solutions: Vec<Solution>,
    pub counters: PruneCounters,
}

fn fmt_node(n: u64, terms: &[u64]) -> String {
    let mut s = format!("{n};");
    for (i, a) in terms.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{a}");
    }
    s
}

fn parse_node(line: usize, s: &str) -> Result<FrontierNode> {
    let bad = |reason: &str| Error::Checkpoint {
        line,
        reason: format!("{reason}: {s:?}"),
    };
    let (n, rest) = s.split_once(';').ok_or_else(|| bad("missing ';'"))?;
    let n: u64 = n.trim().parse().map_err(|_| bad("bad n"))?;
    let prefix = if rest.trim().is_empty() {
        Vec::new()
    } else {
        rest.split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad("bad term"))?
    };
    if prefix.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("terms not increasing"));
    }
    Ok(FrontierNode { n, prefix })
}

impl Checkpoint {
    pub fn to_text(&self) -> String {
        let mut s = String::from("# egeq enumerate checkpoint\n");
        let _ = writeln!(s, "#k={}", self.k);
        let _ = writeln!(s, "#total={}", self.total);
        for sol in &self.solutions {
            let terms = sol.terms_u64().expect("enumerated terms fit in u64");
            let n = sol.n_u64().expect("enumerated n fits in u64");
            let _ = writeln!(s, "#solution={}", fmt_node(n, &terms));
        }
        for (name, v) in self.counters.entries() {
            let _ = writeln!(s, "#counter={name}:{v}");
        }
        for node in &self.pending {
            s.push_str(&fmt_node(node.n, &node.prefix));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut k = None;
        let mut total = None;
        let mut pending = Vec::new();
        let mut solutions = Vec::new();
        let mut counters = PruneCounters::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() {
                continue;
            }
            let bad = |reason: String| Error::Checkpoint { line, reason };
            if let Some(meta) = l.strip_prefix('#') {
                if let Some(v) = meta.strip_prefix("k=") {
                    k = Some(v.parse::<u64>().map_err(|_| bad(format!("bad k {v:?}")))?);
                } else if let Some(v) = meta.strip_prefix("total=") {
                    total = Some(
                        v.parse::<usize>()
                            .map_err(|_| bad(format!("bad total {v:?}")))?,
                    );
                } else if let Some(v) = meta.strip_prefix("solution=") {
                    let node = parse_node(line, v)?;
                    let s = Solution::new(node.n, node.prefix)
                        .map_err(|e| bad(format!("bad solution: {e}")))?;
                    solutions.push(s);
                } else if let Some(v) = meta.strip_prefix("counter=") {
                    let (name, val) = v
                        .split_once(':')
                        .ok_or_else(|| bad(format!("bad counter {v:?}")))?;
                    let val = val
                        .parse::<u64>()
                        .map_err(|_| bad(format!("bad counter value {val:?}")))?;
                    if !counters.set(name, val) {
                        return Err(bad(format!("unknown counter {name:?}")));
                    }
                }
                continue;
            }
            pending.push(parse_node(line, l)?);
        }
        let k = k.ok_or(Error::Checkpoint {
            line: 0,
            reason: "missing #k= header".into(),
        })?;
        let total = total.unwrap_or(pending.len());
        Ok(Self {
            k,
            total,
            pending,
            solutions,
            counters,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Writes via a temporary sibling and a rename so an interrupted save
    /// leaves the previous checkpoint intact.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        fs::write(&tmp, self.to_text())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}
