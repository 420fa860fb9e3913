//! Two-tail solution families and the congruence that generates them.
//!
//! With `a_i = n + i` for `i <= k-2`, `a_(k-1) = n+k+u`, `a_k = n+k+u+1`, the
//! equation balances exactly when
//!
//! ```text
//! n = 2^(k-1) - k + (3 * 2^(k-1) + 3u + 1) / (2^(u+3) - 3)
//! ```
//!
//! is an integer, i.e. when `2^(k-1) = (-3u-1)/3 (mod M)`, `M = 2^(u+3) - 3`.
//! That is a discrete logarithm to base 2; its solutions form the progression
//! `k = k0 (mod ord_M(2))`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};

use crate::exact_arith::Solution;
use crate::{Error, Result};

/// Moduli below this get orders and logs without outside help.
pub const DIRECT_MODULUS_LIMIT: u64 = 1 << 34;

/// `k = k0 (mod r)` solves the congruence for `u`; `k0` is the least such `k >= 1`
/// and `r = ord_M(2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProgressionRow {
    pub u: u64,
    pub k0: BigUint,
    pub r: BigUint,
}

/// `2^(u+3) - 3`.
pub fn family_modulus(u: u64) -> BigUint {
    (BigUint::one() << (u + 3)) - 3u32
}

/// `n` of the `(u, k)` family member, when integral and positive.
pub fn family_n(u: u64, k: u64) -> Option<BigUint> {
    if k < 2 {
        return None;
    }
    let m = family_modulus(u);
    let p = BigUint::one() << (k - 1);
    let (q, rem) = (&p * 3u32 + 3 * u + 1u32).div_rem(&m);
    if !rem.is_zero() {
        return None;
    }
    let n = p + q;
    (n > BigUint::from(k)).then(|| n - k)
}

/// `(n; n+1, ..., n+k-2, n+k+u, n+k+u+1)` for an integral family member.
pub fn family_solution(u: u64, k: u64) -> Result<Option<Solution>> {
    let Some(n) = family_n(u, k) else {
        return Ok(None);
    };
    let mut offsets: Vec<u64> = (1..=k - 2).collect();
    offsets.push(k + u);
    offsets.push(k + u + 1);
    Solution::from_offsets(n, offsets).map(Some)
}

/// `3 * 2^(k-1) + 3u + 1 = 0 (mod 2^(u+3) - 3)`, by modular exponentiation.
pub fn family_identity_holds(u: u64, k: &BigUint) -> bool {
    if k.is_zero() {
        return false;
    }
    let m = family_modulus(u);
    let p = BigUint::from(2u32).modpow(&(k - 1u32), &m);
    ((p * 3u32) + 3 * u + 1u32) % &m == BigUint::zero()
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Trial-division factorization, ascending primes.
fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn check_modulus(modulus: &BigUint) -> Result<()> {
    if modulus.is_even() {
        return Err(Error::EvenModulus(modulus.clone()));
    }
    if *modulus < BigUint::from(3u32) {
        return Err(Error::Precondition(format!("modulus {modulus} is below 3")));
    }
    Ok(())
}

fn direct_modulus(modulus: &BigUint) -> Result<u64> {
    check_modulus(modulus)?;
    match modulus.to_u64() {
        Some(m) if m < DIRECT_MODULUS_LIMIT => Ok(m),
        _ => Err(Error::UnsupportedModulus(modulus.clone())),
    }
}

/// `ord_m(2)` by doubling a residue until it returns to 1.
pub fn mult_order_iterative(modulus: &BigUint) -> Result<BigUint> {
    let m = direct_modulus(modulus)?;
    let mut x = 2 % m;
    let mut v = 1u64;
    while x != 1 {
        x <<= 1;
        if x >= m {
            x -= m;
        }
        v += 1;
    }
    Ok(BigUint::from(v))
}

/// `ord_m(2)` from the Carmichael exponent of `m`, with `m` factored by trial
/// division and the exponent reduced prime by prime.
pub fn mult_order(modulus: &BigUint) -> Result<BigUint> {
    let m = direct_modulus(modulus)?;
    let mut lambda = 1u64;
    for (p, e) in factor_u64(m) {
        let pe = p.pow(e - 1) * (p - 1);
        lambda = lambda.lcm(&pe);
    }
    let mut order = lambda;
    for (q, _) in factor_u64(lambda) {
        while order.is_multiple_of(q) && pow_mod(2, order / q, m) == 1 {
            order /= q;
        }
    }
    Ok(BigUint::from(order))
}

/// `ord_m(2)` given the factorization of some multiple of it.
pub fn mult_order_from_multiple(modulus: &BigUint, multiple: &[(BigUint, u32)]) -> Result<BigUint> {
    check_modulus(modulus)?;
    let two = BigUint::from(2u32);
    let mut order = multiple
        .iter()
        .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
    if two.modpow(&order, modulus) != BigUint::one() {
        return Err(Error::BadFactorization);
    }
    for (q, e) in multiple {
        for _ in 0..*e {
            let (cand, rem) = order.div_rem(q);
            if !rem.is_zero() || two.modpow(&cand, modulus) != BigUint::one() {
                break;
            }
            order = cand;
        }
    }
    Ok(order)
}

fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    use num_bigint::BigInt;
    let a = BigInt::from(a.clone());
    let m = BigInt::from(m.clone());
    let g = a.extended_gcd(&m);
    if !g.gcd.is_one() {
        return None;
    }
    g.x.mod_floor(&m).to_biguint()
}

/// Least `e` in `[0, order)` with `base^e = target (mod m)`, where `order` is
/// the order of `base`. Baby steps `base^j` for `j < ceil(sqrt(order))` go in
/// a table keeping the smallest `j`; giant steps multiply by `base^-s`.
fn bsgs_generic(base: &BigUint, target: &BigUint, m: &BigUint, order: &BigUint) -> Option<BigUint> {
    if let (Some(mm), Some(ord)) = (m.to_u64(), order.to_u64()) {
        if mm < 1 << 63 {
            let b = (base % m).to_u64().expect("reduced");
            let t = (target % m).to_u64().expect("reduced");
            return bsgs_u64(b, t, mm, ord).map(BigUint::from);
        }
    }
    let s = order.sqrt() + 1u32;
    let steps = s.to_u64().expect("sqrt(order) fits in u64");
    let mut table: HashMap<BigUint, u64> = HashMap::with_capacity(steps as usize);
    let mut cur = BigUint::one() % m;
    for j in 0..steps {
        table.entry(cur.clone()).or_insert(j);
        cur = cur * base % m;
    }
    let giant = mod_inverse(&base.modpow(&s, m), m)?;
    let mut gamma = target % m;
    let mut i = BigUint::zero();
    while &i * &s < *order {
        if let Some(&j) = table.get(&gamma) {
            let e = &i * &s + j;
            if e < *order {
                return Some(e);
            }
        }
        gamma = gamma * &giant % m;
        i += 1u32;
    }
    None
}

fn bsgs_u64(base: u64, target: u64, m: u64, order: u64) -> Option<u64> {
    let s = order.sqrt() + 1;
    let mut table: HashMap<u64, u64> = HashMap::with_capacity(s as usize);
    let mut cur = 1 % m;
    for j in 0..s {
        table.entry(cur).or_insert(j);
        cur = mul_mod(cur, base, m);
    }
    // base^-s = base^(order - s mod order)
    let giant = pow_mod(base, (order - s % order) % order, m);
    let mut gamma = target % m;
    let mut i = 0u64;
    while i * s < order {
        if let Some(&j) = table.get(&gamma) {
            let e = i * s + j;
            if e < order {
                return Some(e);
            }
        }
        gamma = mul_mod(gamma, giant, m);
        i += 1;
    }
    None
}

/// Least `e` in `[0, order)` with `2^e = target (mod modulus)`, or `None` when
/// `target` is not a power of 2. `order` must be `ord_modulus(2)`.
pub fn bsgs_dlog(target: &BigUint, modulus: &BigUint, order: &BigUint) -> Option<BigUint> {
    bsgs_generic(&BigUint::from(2u32), target, modulus, order)
}

/// Discrete log base 2 by Pohlig-Hellman over the supplied factorization of
/// `ord_modulus(2)`; each prime-order piece is solved by baby-step/giant-step.
pub fn pohlig_hellman_dlog(
    target: &BigUint,
    modulus: &BigUint,
    order_factors: &[(BigUint, u32)],
) -> Option<BigUint> {
    let two = BigUint::from(2u32);
    let order = order_factors
        .iter()
        .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
    let target = target % modulus;
    let mut residue = BigUint::zero();
    let mut acc_mod = BigUint::one();
    for (p, e) in order_factors {
        let cofactor = &order / p;
        let gamma = two.modpow(&cofactor, modulus);
        let mut x = BigUint::zero();
        let mut pj = BigUint::one();
        for j in 0..*e {
            let inv = mod_inverse(&two.modpow(&x, modulus), modulus)?;
            let h = (&target * inv % modulus).modpow(&(&order / (&pj * p)), modulus);
            let d = bsgs_generic(&gamma, &h, modulus, p)?;
            x += d * &pj;
            if j + 1 < *e {
                pj *= p;
            }
        }
        let pe = p.pow(*e);
        // Merge x (mod p^e) into the running residue; the moduli are coprime.
        let inv = mod_inverse(&(&acc_mod % &pe), &pe)?;
        let diff = (&x + &pe - (&residue % &pe)) % &pe;
        let t = diff * inv % &pe;
        residue += t * &acc_mod;
        acc_mod *= &pe;
    }
    let e = residue % &order;
    (two.modpow(&e, modulus) == target).then_some(e)
}

/// `(-3u - 1) / 3 (mod M)`: the value `2^(k-1)` must take.
pub fn congruence_target(u: u64) -> BigUint {
    let m = family_modulus(u);
    let three = BigUint::from(3u32);
    // M = +-1 (mod 3), so 3 is invertible.
    let inv3 = mod_inverse(&three, &m).expect("3 is invertible mod 2^(u+3) - 3");
    let rhs = (&m - (BigUint::from(3 * u + 1) % &m)) % &m;
    rhs * inv3 % &m
}

fn row_from_log(u: u64, e: Option<BigUint>, r: BigUint) -> Option<ProgressionRow> {
    e.map(|e| ProgressionRow { u, k0: e + 1u32, r })
}

/// Solves the congruence for `u` when `2^(u+3) - 3` is within direct range.
pub fn solve_congruence(u: u64) -> Result<Option<ProgressionRow>> {
    let m = family_modulus(u);
    let r = mult_order(&m)?;
    let c = congruence_target(u);
    Ok(row_from_log(u, bsgs_dlog(&c, &m, &r), r))
}

/// Solves the congruence for any `u` given the factorization of a multiple of
/// `ord_M(2)`.
pub fn solve_congruence_factored(
    u: u64,
    order_multiple: &[(BigUint, u32)],
) -> Result<Option<ProgressionRow>> {
    let m = family_modulus(u);
    let r = mult_order_from_multiple(&m, order_multiple)?;
    // Refactor the reduced order from the supplied primes.
    let mut factors = Vec::new();
    let mut rest = r.clone();
    for (p, _) in order_multiple {
        let mut e = 0;
        while (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p.clone(), e));
        }
    }
    debug_assert!(rest.is_one());
    let c = congruence_target(u);
    Ok(row_from_log(u, pohlig_hellman_dlog(&c, &m, &factors), r))
}

/// A row too large for direct search, stored with the factorization of `r`.
#[derive(Clone, Debug)]
pub struct EmbeddedRow {
    pub u: u64,
    pub k0: &'static str,
    pub r: &'static str,
    pub r_factors: &'static [(u64, u32)],
}

impl EmbeddedRow {
    pub fn row(&self) -> ProgressionRow {
        ProgressionRow {
            u: self.u,
            k0: self.k0.parse().expect("valid constant"),
            r: self.r.parse().expect("valid constant"),
        }
    }

    pub fn factors(&self) -> Vec<(BigUint, u32)> {
        self.r_factors
            .iter()
            .map(|&(p, e)| (BigUint::from(p), e))
            .collect()
    }
}

/// Rows with `u` in {55, 99, 113, 119}; `r_factors` multiply out to `r`.
pub const EMBEDDED_ROWS: [EmbeddedRow; 4] = [
    EmbeddedRow {
        u: 55,
        k0: "5843993308712118",
        r: "26202761468337430",
        r_factors: &[(2, 1), (5, 1), (6596077, 1), (397247659, 1)],
    },
    EmbeddedRow {
        u: 99,
        k0: "364550281031913286431277811782",
        r: "2535300206192230667655098198606",
        r_factors: &[
            (2, 1),
            (83, 1),
            (15361, 1),
            (4594009129, 1),
            (216426263034389, 1),
        ],
    },
    EmbeddedRow {
        u: 113,
        k0: "2452672773763126728478631379525174",
        r: "83076749736557242056487941267521532",
        r_factors: &[
            (2, 2),
            (3, 2),
            (7, 1),
            (571, 1),
            (32377, 1),
            (174763, 1),
            (524287, 1),
            (1212847, 1),
            (160465489, 1),
        ],
    },
    EmbeddedRow {
        u: 119,
        k0: "3303995011423016739508338720636484139",
        r: "5316911983139663491615228241121378300",
        r_factors: &[
            (2, 2),
            (3, 2),
            (5, 2),
            (7, 1),
            (11, 1),
            (13, 1),
            (17, 1),
            (31, 1),
            (41, 1),
            (61, 1),
            (151, 1),
            (241, 1),
            (331, 1),
            (1321, 1),
            (61681, 1),
            (4562284561, 1),
        ],
    },
];

/// The congruence holds at `k0`, `2^r = 1`, and `1 <= k0 <= r`.
pub fn verify_row(row: &ProgressionRow) -> bool {
    let m = family_modulus(row.u);
    !row.k0.is_zero()
        && row.k0 <= row.r
        && family_identity_holds(row.u, &row.k0)
        && BigUint::from(2u32).modpow(&row.r, &m).is_one()
}

/// Largest `u` whose modulus is in direct range.
pub fn max_direct_u() -> u64 {
    // 2^(u+3) - 3 < 2^34
    30
}

/// How a `u` ended up in a table scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableEntry {
    Computed(ProgressionRow),
    VerifiedConstant(ProgressionRow),
    Unsupported(u64),
}

impl TableEntry {
    pub fn u(&self) -> u64 {
        match self {
            TableEntry::Computed(r) | TableEntry::VerifiedConstant(r) => r.u,
            TableEntry::Unsupported(u) => *u,
        }
    }

    pub fn row(&self) -> Option<&ProgressionRow> {
        match self {
            TableEntry::Computed(r) | TableEntry::VerifiedConstant(r) => Some(r),
            TableEntry::Unsupported(_) => None,
        }
    }
}

/// All solvable `u <= u_max`, ascending: computed where the modulus allows,
/// embedded constants (after verification) beyond, and `Unsupported` markers
/// for every other `u` out of direct range. Unsolvable `u` are omitted.
pub fn table_rows(u_max: u64) -> Result<Vec<TableEntry>> {
    let mut out = Vec::new();
    for u in 0..=u_max {
        if u <= max_direct_u() {
            if let Some(row) = solve_congruence(u)? {
                out.push(TableEntry::Computed(row));
            }
        } else if let Some(e) = EMBEDDED_ROWS.iter().find(|e| e.u == u) {
            let row = e.row();
            if !verify_row(&row) {
                return Err(Error::Certification(u));
            }
            out.push(TableEntry::VerifiedConstant(row));
        } else {
            out.push(TableEntry::Unsupported(u));
        }
    }
    Ok(out)
}

/// The sixteen solvable rows with `u <= 120`.
pub fn known_rows() -> Result<Vec<ProgressionRow>> {
    Ok(table_rows(120)?
        .into_iter()
        .filter_map(|e| e.row().cloned())
        .collect())
}
