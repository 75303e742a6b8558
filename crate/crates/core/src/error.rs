use thiserror::Error;

/// Error type shared by every operation in the workbench.
///
/// Each variant carries a stable machine-readable code (see [`Error::code`])
/// so that front-ends can map failures to exit codes without string matching.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("element is not homogeneous: {0}")]
    Inhomogeneous(String),

    #[error("missing derivation value for generator `{0}`")]
    MissingDerivationValue(String),

    #[error("basis for {piece} has size at least {size}, exceeding the cap {cap}")]
    BasisCapExceeded { piece: String, size: usize, cap: usize },

    #[error("truncation too small: {0}")]
    TruncationOverflow(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable code for this error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "E_SYNTAX",
            Error::UnknownName(_) => "E_UNKNOWN_NAME",
            Error::InvalidSpec(_) => "E_INVALID_SPEC",
            Error::Inhomogeneous(_) => "E_INHOMOGENEOUS",
            Error::MissingDerivationValue(_) => "E_MISSING_VALUE",
            Error::BasisCapExceeded { .. } => "E_CAP",
            Error::TruncationOverflow(_) => "E_TRUNCATION",
            Error::Precondition(_) => "E_PRECONDITION",
            Error::Unsupported(_) => "E_UNSUPPORTED",
            Error::Internal(_) => "E_INTERNAL",
        }
    }

    /// True for errors that should map to the "resource cap" exit code.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::BasisCapExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
