use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("label list is not a permutation of the operator's labels")]
    NotAPermutation,
    #[error("label `{name}` has dimension {left} on one side and {right} on the other")]
    DimMismatch { name: String, left: usize, right: usize },
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("label `{0}` is shared by more than two operators in a chain")]
    TripleSharedLabel(String),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("operator is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("operator is not a deterministic comb (worst residual {0:.3e})")]
    NotAComb(f64),
    #[error("operator is not covariant (commutator norm {0:.3e})")]
    NotCovariant(f64),
    #[error("quadrature is not exact enough for this integrand (residual {0:.3e})")]
    QuadratureInsufficient(f64),
    #[error("bad group-element parameterization: {0}")]
    BadParameterization(String),
    #[error("unsupported group or irrep combination: {0}")]
    UnsupportedGroup(String),
    #[error("representations do not share the same irrep content: {0}")]
    IrrepMismatch(String),
    #[error("probability assignment is infeasible: {0}")]
    Infeasible(String),
    #[error("missing projector for {0}")]
    MissingProjector(String),
    #[error("solver did not converge: KKT residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
