//! Optimal quantum combs for transforming uses of group-parameterized
//! unitaries into a target unitary.
//!
//! The crate provides label-indexed operators and the link product, comb
//! verification and construction, a representation engine for U(1), SU(2)
//! and the SU(d) defining family, the reduced concave program over irrep
//! probabilities, the explicit optimal comb and its fidelity evaluation, and
//! simulators for the 1→2 phase-gate cloning circuits.

pub mod error;
pub mod linalg;
pub mod tensor;
pub mod choi;
pub mod groups;
pub mod reduced;
pub mod combs;
pub mod builder;
pub mod circuits;
pub mod pipeline;

pub use error::{Error, Result};
