//! Exact computation with the dyadic equation
//!
//! ```text
//! n / 2^n = a_1 / 2^a_1 + ... + a_k / 2^a_k,   k >= 2,  a_1 < ... < a_k
//! ```
//!
//! The crate is split by concern:
//!
//! - [`exact_arith`]: dyadic and general rationals, solution verification, term inversion.
//! - [`bounds`]: closed-form constraints every solution obeys.
//! - [`enumerate`]: complete pruned search for a fixed number of terms.
//! - [`greedy`]: the integerized greedy expansion sequence.
//! - [`congruence`]: multiplicative orders, discrete logs and the two-tail solution families.
//! - [`crt`]: intersection of arithmetic progressions with non-coprime moduli.
//! - [`chains`]: multiplicity constructions built from repeated expansion.

pub mod bounds;
pub mod chains;
pub mod congruence;
pub mod crt;
pub mod enumerate;
mod error;
pub mod exact_arith;
pub mod greedy;

pub use error::{Error, Result};
pub use exact_arith::{DyadicRational, Rational, Solution};
