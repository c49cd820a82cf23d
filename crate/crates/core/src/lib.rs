//! Two-qubit SWAP thermal machine whose qubits are Unruh-DeWitt detectors
//! moving inertially through thermal scalar-field baths.
//!
//! The crate is layered bottom-up:
//!
//! - [`numerics`]: stable special functions, bracketing root finder and
//!   golden-section maximizer.
//! - [`detector`]: transition rates and motion-induced effective temperatures.
//! - [`machine`]: closed-form cycle moments, uncertainty relations, regime
//!   classification and performance bounds.
//! - [`stochastic`]: exact enumeration of the four two-point-measurement
//!   outcomes; the independent oracle for everything in [`machine`].
//! - [`sweep`] and [`verify`]: the tabular reports and the invariant suite
//!   driven by the `relmachine` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod detector;
pub mod error;
pub mod machine;
pub mod numerics;
pub mod report;
pub mod stochastic;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
