//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("basis pattern must contain at least one particle")]
    EmptyPattern,
    #[error("duplicate basis pattern at index {0}")]
    DuplicatePattern(usize),
    #[error("state has no nonzero amplitude")]
    ZeroState,
    #[error("dimension mismatch: {left} vs {right} particles")]
    DimensionMismatch { left: usize, right: usize },
    #[error("particle index {particle} out of range for {n} particles")]
    ParticleOutOfRange { particle: usize, n: usize },
    #[error("duplicate particle index {0}")]
    DuplicateParticle(usize),
    #[error("particle count {n} outside supported range {min}..={max}")]
    ParticleCountOutOfRange { n: usize, min: usize, max: usize },
    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix is not hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("axis {0} is not supported by this operation")]
    UnsupportedAxis(char),
    #[error("q = {0} outside the open-closed interval (0, 1/2]")]
    QOutOfRange(f64),
    #[error("phase vector has {got} entries, expected {expected}")]
    PhaseVectorLength { got: usize, expected: usize },
    #[error("phase assignment has {got} entries, expected {expected}")]
    PhaseAssignmentLength { got: usize, expected: usize },
    #[error("queries overlap on particle {0}")]
    OverlappingQueries(usize),
    #[error("subset of particles is empty")]
    EmptySubset,
    #[error("keep set must be a nonempty proper subset of the particles")]
    InvalidKeepSet,
    #[error("system of {requested} particles exceeds the cap of {cap}")]
    DimensionCap { requested: usize, cap: usize },
    #[error("sides do not form a bipartition of the reduced system")]
    InvalidSplit,
    #[error("eigensolver failed to converge")]
    EigensolverNoConvergence,
    #[error("state is not an eigenstate of the observable (residual {residual:.3e})")]
    NotAnEigenstate { residual: f64 },
    #[error("max_k = {max_k} invalid for {n} particles")]
    MaxKOutOfRange { max_k: usize, n: usize },
    #[error("amplitude test and statistics test disagree: {0}")]
    InternalInconsistency(String),
    #[error("state file: {0}")]
    StateFormat(String),
    #[error("invalid axis string: {0}")]
    BadAxisString(String),
}
