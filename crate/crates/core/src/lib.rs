//! Compile small verifier circuits into explicit 3-local Hamiltonians and
//! certify their spectral properties numerically.
//!
//! The crate implements the Feynman–Kitaev clock reduction in two layouts:
//!
//! * a 3-local instance on `N + T` qubits with a unary clock register and a
//!   `T^12` penalty on illegal clock patterns ([`reduction::build_3local`]),
//! * a reference instance on the `2^N (T+1)`-dimensional space with an
//!   explicit clock factor ([`reduction::build_reference`]).
//!
//! Everything is desk scale and exact: circuits are simulated with a dense
//! statevector, Hamiltonians are assembled as dense matrices up to 13 qubits,
//! and the [`verify`] module checks the completeness bound `eps/(T+1)`, the
//! soundness chain through `9/T^4`, the clock penalty floor and the
//! basis-renaming equivalence between the two layouts on concrete instances.
//!
//! # Conventions
//!
//! * Qubit `i` maps to bit `i` of a basis-state index, least significant
//!   first. A gate's (or term's) local basis follows its target list the same
//!   way: the first listed qubit is the least significant local bit.
//! * Qubit 0 is the circuit's output qubit; the proof occupies qubits
//!   `0..m` and the ancillas `m..N` start in `|0>`.
//! * Clock step `t` (1-based) lives on global qubit `N + t - 1`; the legal
//!   clock states are the unary patterns `1..1 0..0`.

pub mod circuit;
mod error;
mod linalg;
pub mod operators;
pub mod reduction;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use nalgebra;

/// Largest qubit count for which operators are materialized as dense
/// matrices. Above this, only matrix-vector products are available.
pub const DENSE_QUBIT_LIMIT: usize = 13;

/// Hard cap on total qubit count for any constructed operator.
pub const MAX_QUBITS: usize = 30;

/// Format a float with 15 significant digits, the fixed width used by every
/// emitted artifact so identical runs produce identical bytes.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.14e}")
}
