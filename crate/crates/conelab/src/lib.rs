//! Cone-ordered optimality made computable on finite-dimensional
//! truncations of sequence spaces.
//!
//! The library works with dense coordinate vectors standing for truncated
//! elements of the classical sequence spaces ([`spaces`]), the convex cone
//! families that order them ([`cones`]), a fixed catalogue of convex
//! feasible sets exposed through membership / projection /
//! linear-maximization oracles ([`sets`]), and the optimality analysis
//! built on top ([`analysis`]): maximality and positive-support
//! certificates, strict-maximality modulus estimation, and a
//! dilating-cone approximation loop that produces positively supported
//! points arbitrarily close to a maximal point. [`cli`] wraps the
//! analysis in a reproducible CSV/JSON command-line front end and
//! [`solvers`] holds the shared numeric primitives.

pub mod spaces;
mod linalg;
pub mod solvers;
pub mod cones;
pub mod sets;
pub mod analysis;
pub mod cli;

pub use analysis::{AbbIterate, AbbTrace, DeltaCertificate, GalleryFamily, ModulusReport};
pub use cones::{BaseSpec, ConeSpec};
pub use sets::{Certificate, SetSpec, Verdict};
pub use solvers::SolverConfig;
pub use spaces::{NormKind, Vector};

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input data: empty vectors, non-finite entries, bad brackets.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A documented precondition on an operation parameter is violated.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("ambient norm mismatch: {left:?} vs {right:?}")]
    AmbientMismatch {
        left: spaces::NormKind,
        right: spaces::NormKind,
    },
    /// An iterative solver exhausted its iteration budget. Carries the best
    /// iterate seen so that callers can decide whether it is still usable.
    #[error("solver failed after {iterations} iterations (residual {residual:.3e})")]
    SolverFailure {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },
    /// The finite truncation cannot express the requested certificate.
    #[error("truncation saturated: {0}")]
    TruncationSaturated(String),
    /// Hyperplane separation could not be established.
    #[error("separation failed: {0}")]
    SeparationFailed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// One row of a regression gallery or diagnostic table: an index, named
/// numeric columns (order is fixed per family) and a row-level pass flag.
#[derive(Debug, Clone, PartialEq)]
pub struct GalleryRow {
    pub n: usize,
    pub columns: Vec<(&'static str, f64)>,
    pub pass: bool,
}

impl GalleryRow {
    /// Looks up a column by name.
    pub fn value(&self, name: &str) -> Option<f64> {
        self.columns
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
    }
}
