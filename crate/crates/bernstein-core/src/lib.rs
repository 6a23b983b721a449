//! Construction and analysis of N-qubit states whose z-outcomes are
//! independent on every proper subset of particles yet dependent jointly,
//! together with the entanglement structure of their reductions.
//!
//! The crate covers:
//!
//! - dense state vectors and density matrices with bitmask basis indexing
//!   ([`qstate`]);
//! - builders for the Bernstein, GHZ, and inhomogeneous families and for
//!   local phase transformations ([`constructions`]);
//! - joint outcome probabilities, marginals, k-wise independence reports,
//!   and the Bernstein certificate ([`stats`]);
//! - partial traces, partial transposes, PPT spectra, and the constructive
//!   separable decomposition behind the fragility report ([`reductions`]);
//! - the period lattice and orbit membership of local phase transformations
//!   ([`phase_torus`]);
//! - the generalized Mermin relations and their GF(2) contradiction sets
//!   ([`mermin`]).
//!
//! With the default `parallel` feature the sweep kernels fan out over rayon;
//! building with `--no-default-features` selects the sequential fallback.
//! Outputs are identical either way.

pub mod constructions;
pub mod error;
pub mod exec;
pub mod io;
pub mod linalg;
pub mod mermin;
pub mod phase_torus;
pub mod qstate;
pub mod reductions;
pub mod stats;

pub use error::{Error, Result};
pub use qstate::{Axis, DensityMatrix, Sign, Spin, StateVector};
