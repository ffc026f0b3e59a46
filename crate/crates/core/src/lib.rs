//! Exact arithmetic for supersingular Dieudonne lattices.
//!
//! The crate is organised bottom-up:
//!
//! * [`ffq`] finite fields `F_{p^{2k}}` with Frobenius,
//! * [`wittring`] truncated Witt vectors and the twisted ring `W[Pi; sigma]/(Pi^N)`,
//! * [`lattice`] the distinguished tau-stable lattice, its operators, pairing and Dieudonne spans,
//! * [`semilinear`] Moore matrices and semilinear systems over `F_q`,
//! * [`sampler`] construction and verification of lattice generators,
//! * [`stabilizer`] automorphism stabilizers modulo `Pi^s` and their classification,
//! * [`report`] the JSON experiment driver shared by the command line tool.

pub mod error;
pub mod ffq;
pub mod filtered;
pub mod lattice;
pub mod linalg;
pub mod report;
pub mod sampler;
pub mod seeds;
pub mod semilinear;
pub mod stabilizer;
pub mod wittring;

pub use error::{Error, Result};
