//! Centered rarefaction waves for the two-dimensional isentropic Euler equations.
//!
//! The crate is organised bottom-up:
//!
//! * [`gas_model`] – polytropic gas law, Riemann invariants, mechanical energy pair.
//! * [`riemann1d`] – exact self-similar solution of the plane-symmetric Riemann problem.
//! * [`acoustic_geometry`] – acoustical metric, null frames, Hamiltonian null geodesics.
//! * [`data_construction`] – singular rarefaction data on a slice `t = δ` built from Taylor series.
//! * [`solver2d`] – finite-volume solver on the periodic strip `R × [0, 2π)`.
//! * [`relative_entropy`] – relative entropy/flux and weak–strong comparison diagnostics.
//! * [`cli`] – config handling and the batch drivers behind the command-line tool.

pub mod acoustic_geometry;
pub mod cli;
pub mod data_construction;
pub mod error;
pub mod gas_model;
pub mod jets;
pub mod relative_entropy;
pub mod riemann1d;
pub mod solver2d;
pub mod spectral;

pub use error::{Error, Result};
pub use gas_model::{ConservedState, GasLaw, InvariantState, PrimitiveState};
