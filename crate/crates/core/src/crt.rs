//! Intersecting the progressions `k = k0 (mod r)` of several families.

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::congruence::{family_identity_holds, ProgressionRow};
use crate::{Error, Result};

/// The integers `residue + t * modulus`; `residue` is reduced into `[0, modulus)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CongruenceClass {
    residue: BigUint,
    modulus: BigUint,
}

impl CongruenceClass {
    pub fn new(residue: BigUint, modulus: BigUint) -> Result<Self> {
        if modulus.is_zero() {
            return Err(Error::Precondition("zero modulus".into()));
        }
        Ok(Self {
            residue: residue % &modulus,
            modulus,
        })
    }

    pub fn of_row(row: &ProgressionRow) -> Self {
        Self::new(row.k0.clone(), row.r.clone()).expect("order is positive")
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        x % &self.modulus == self.residue
    }

    /// Smallest member that is at least `lo`.
    pub fn least_at_least(&self, lo: &BigUint) -> BigUint {
        if *lo <= self.residue {
            return self.residue.clone();
        }
        let steps = (lo - &self.residue).div_ceil(&self.modulus);
        &self.residue + steps * &self.modulus
    }
}

/// Common members of two progressions, or `None` when the residues disagree
/// modulo the gcd of the moduli.
pub fn crt_pair(a: &CongruenceClass, b: &CongruenceClass) -> Option<CongruenceClass> {
    let (m1, m2) = (
        BigInt::from(a.modulus.clone()),
        BigInt::from(b.modulus.clone()),
    );
    let (r1, r2) = (
        BigInt::from(a.residue.clone()),
        BigInt::from(b.residue.clone()),
    );
    let eg = m1.extended_gcd(&m2);
    let g = eg.gcd;
    let diff = &r2 - &r1;
    if !(&diff % &g).is_zero() {
        return None;
    }
    let m2g = &m2 / &g;
    // r1 + m1 * t with t = (diff / g) * inv(m1 / g) mod (m2 / g)
    let t = ((&diff / &g) * eg.x).mod_floor(&m2g);
    let lcm = &m1 * &m2g;
    let x = (r1 + m1 * t).mod_floor(&lcm);
    Some(CongruenceClass {
        residue: x.to_biguint().expect("reduced"),
        modulus: lcm.to_biguint().expect("positive"),
    })
}

/// Folds `crt_pair` over the rows' classes.
pub fn combine_rows(rows: &[ProgressionRow]) -> Result<Option<CongruenceClass>> {
    let Some((first, rest)) = rows.split_first() else {
        return Err(Error::Precondition("no rows to combine".into()));
    };
    let mut acc = CongruenceClass::of_row(first);
    for row in rest {
        match crt_pair(&acc, &CongruenceClass::of_row(row)) {
            Some(c) => acc = c,
            None => return Ok(None),
        }
    }
    Ok(Some(acc))
}

/// A compatible subset and the class it pins down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibleSubset {
    pub rows: Vec<ProgressionRow>,
    pub class: CongruenceClass,
}

impl CompatibleSubset {
    pub fn u_set(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.u).collect()
    }
}

/// Every `m`-subset of `rows` (in combination order) whose classes intersect.
pub fn scan_subsets(rows: &[ProgressionRow], m: usize) -> Result<Vec<CompatibleSubset>> {
    if m == 0 || m > rows.len() {
        return Err(Error::Precondition(format!(
            "subset size {m} out of range for {} rows",
            rows.len()
        )));
    }
    let subsets: Vec<Vec<ProgressionRow>> = rows.iter().cloned().combinations(m).collect();
    let found: Vec<Option<CompatibleSubset>> = subsets
        .into_par_iter()
        .map(|rows| {
            combine_rows(&rows)
                .expect("nonempty")
                .map(|class| CompatibleSubset { rows, class })
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// Lower bound on the number of solutions for the least `k >= 2` in `class`:
/// one family solution per row plus the trivial one. Each row's congruence is
/// rechecked at that `k`.
pub fn certify_multiplicity(class: &CongruenceClass, rows: &[ProgressionRow]) -> Result<u64> {
    let k = class.least_at_least(&BigUint::from(2u32));
    for row in rows {
        if !family_identity_holds(row.u, &k) {
            return Err(Error::Certification(row.u));
        }
    }
    let distinct = rows.iter().map(|r| r.u).unique().count();
    if distinct != rows.len() {
        return Err(Error::Precondition("repeated u in rows".into()));
    }
    Ok(1 + rows.len() as u64)
}
