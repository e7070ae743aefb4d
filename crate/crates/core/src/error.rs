//! Crate-wide error type.
//!
//! Shape mismatches, precision mismatches between operands, and index errors
//! are programmer errors and panic at the call site. The variants here cover
//! the failures a correct caller can still run into: bad configuration,
//! degenerate input data, exhausted precision, and internal cross-checks
//! that a structural theorem says must hold.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Inversion of a series whose constant term vanishes.
    #[error("element is not a unit: constant term is zero")]
    NotAUnit,

    /// A square matrix over the truncated ring with non-invertible reduction.
    #[error("matrix is not invertible over the truncated ring")]
    Singular,

    /// A claimed isotropic lattice fails its defining conditions.
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    /// An internal cross-check failed; indicates a bug, not bad input.
    #[error("internal consistency failure: {0}")]
    Inconsistency(String),

    /// A computation needed more s-adic precision than was available.
    #[error("precision cap {cap} exhausted")]
    PrecisionExhausted { cap: usize },

    /// A dimension sequence that cannot arise from any torsion profile.
    #[error("inconsistent dimension sequence: {0}")]
    InconsistentSequence(String),

    /// A rejection-sampling loop ran out of attempts.
    #[error("random sampling exhausted its retry budget: {0}")]
    RetriesExhausted(String),

    /// Bad configuration or input data supplied by the caller.
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
