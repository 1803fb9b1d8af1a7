//! Workbench for lattice codes over Rician fading SISO channels.
//!
//! Builds rotated-Z^n code lattices (Hadamard, identity, BCC, user-supplied
//! rotations), audits their packing and diversity figures of merit, evaluates
//! pairwise-error-probability bounds and well-roundedness-after-fading
//! probabilities, and runs seeded Monte Carlo error-rate sweeps with exact
//! maximum-likelihood decoding.

pub mod analysis;
pub mod channel;
pub mod decoder;
mod error;
pub mod lattice;
pub mod numerics;
pub mod rng;
pub mod rotations;
pub mod sweep;

pub use error::{Error, Result};
