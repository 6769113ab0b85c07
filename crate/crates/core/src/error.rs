use thiserror::Error;

/// Errors raised by the numerical core and the model loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix dimension {0} exceeds the supported maximum of 1024")]
    TooLarge(usize),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("leading coefficient of the quadratic pencil is singular")]
    SingularMass,

    #[error("QR iteration did not converge (unconverged eigenvalue index {index})")]
    NoConvergence { index: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("indefinite product is numerically zero ({0})")]
    DegenerateSignature(String),

    #[error("reduced pencil has a singular leading matrix; the two-mode reduction breaks down")]
    DegeneratePencil,

    #[error("operation requires a Hamiltonian perturbation (delta = nu = 0)")]
    NonHamiltonian,

    #[error("operation requires a mixed-signature node (alpha*beta < 0)")]
    DefiniteNode,

    #[error("perturbation is zero; nothing to classify")]
    ZeroPerturbation,

    #[error("degenerate discriminant: {0}")]
    DegenerateDiscriminant(String),

    #[error("branch-cut line is degenerate (Im c vanishes identically)")]
    DegenerateLine,

    #[error("isotropic block: exceptional points move to infinity")]
    IsotropicBlock,

    #[error("parameter regime does not match the requested case: {0}")]
    RegimeMismatch(String),

    #[error("parallel branches never cross")]
    ParallelBranches,

    #[error("found {found} exact eigenvalues within radius {radius} of the node (need 2)")]
    InsufficientEigenvalues { found: usize, radius: f64 },

    #[error("least-squares fit rejected: {0}")]
    FitRejected(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
