//! Exceptional Coulomb coupling constants of the one-dimensional Dirac
//! operator with anomalous magnetic moment, computed two independent ways:
//!
//! * **Shooting** ([`coulomb`]): integrate the Prüfer angle equation
//!   φ' = c + (k − e^{−t}) sin 2φ away from both ends, and bisect the
//!   monotone mismatch of the two unstable branches to locate the couplings
//!   where they match mod π.
//! * **Closed form** ([`closed_form`], [`factorization`]): the couplings are
//!   c_{n−1}(k) = −√(2kn − n²) for integers 1 ≤ n < k, and the matching
//!   solutions are weighted polynomials produced by a factorization chain,
//!   so the supporting identities (recursions, zero counts, ratio limits,
//!   angle limits) are verified by exact rational algebra.
//!
//! Supporting layers: the generic Prüfer transformation with certified
//! crossing counts ([`prufer`]), generic factorization ladders with the
//! harmonic-oscillator and Morse-form examples ([`ladder`]), invariant
//! suites ([`verify`]) and the deterministic batch CLI ([`cli`]).
//!
//! Start with the crate examples (`cargo run --example exceptional_values`)
//! for runnable tours of each capability.

pub mod cli;
pub mod closed_form;
pub mod coulomb;
pub mod error;
pub mod factorization;
pub mod ladder;
mod ode;
pub mod poly;
pub mod prufer;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
