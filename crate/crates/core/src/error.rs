use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid subsystem index {index} for a space with {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("numerical range exceeded: {0}")]
    NumericalRange(String),

    #[error("propagation did not converge within {substeps} substeps (residual {residual:e})")]
    NonConvergence { substeps: usize, residual: f64 },

    #[error("quadrature did not converge at {nodes} nodes (residual {residual:e})")]
    QuadratureNonConvergence { nodes: usize, residual: f64 },

    #[error("total dimension {dim} exceeds the superoperator path limit of {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("Fock cutoff {cutoff} leaves tail mass {tail:e}; the smallest sufficient cutoff is {required}")]
    CutoffTooSmall {
        cutoff: usize,
        tail: f64,
        required: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
