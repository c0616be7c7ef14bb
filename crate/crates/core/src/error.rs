use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable index {var} out of range for a jet in {num_vars} variables")]
    VarOutOfRange { var: usize, num_vars: usize },

    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },

    #[error("{0} variables exceeds the supported maximum of 12")]
    TooManyVariables(usize),

    #[error("truncation degree {0} exceeds the supported maximum of 31")]
    DegreeTooLarge(u32),

    #[error("expected {expected} composition arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("composition argument {index} has a nonzero constant term; recenter it first")]
    NonzeroConstantTerm { index: usize },

    #[error("division by a jet with zero constant term")]
    SingularDivision,

    #[error("matrix `{context}` has a singular constant term")]
    SingularMatrix { context: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("jacobian of the map at the origin is singular")]
    SingularJacobian,

    #[error(
        "reality violated: coefficient of x^{x_exp:?} xbar^{xbar_exp:?} is not the conjugate of its mirror"
    )]
    NotReal { x_exp: Vec<u32>, xbar_exp: Vec<u32> },

    #[error("not strictly positive at the base point: {0}")]
    NotPositive(String),

    #[error("degree budget exceeded: working degree {required} required, {available} available")]
    DegreeBudget { required: u32, available: u32 },

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("quadrature unresolved: relative drift {drift:.3e} exceeds {tolerance:.1e}")]
    QuadratureUnresolved { drift: f64, tolerance: f64 },

    #[error("not available in exact mode: {0}")]
    NotExact(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::VarOutOfRange { .. } => "var_out_of_range",
            Error::VarCountMismatch { .. } => "var_count_mismatch",
            Error::TooManyVariables(_) => "too_many_variables",
            Error::DegreeTooLarge(_) => "degree_too_large",
            Error::ArityMismatch { .. } => "arity_mismatch",
            Error::NonzeroConstantTerm { .. } => "nonzero_constant_term",
            Error::SingularDivision => "singular_division",
            Error::SingularMatrix { .. } => "singular_matrix",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::SingularJacobian => "singular_jacobian",
            Error::NotReal { .. } => "not_real",
            Error::NotPositive(_) => "not_positive",
            Error::DegreeBudget { .. } => "degree_budget",
            Error::Inconsistent(_) => "inconsistent",
            Error::QuadratureUnresolved { .. } => "quadrature_unresolved",
            Error::NotExact(_) => "not_exact",
            Error::Unsupported(_) => "unsupported",
            Error::InvalidInput(_) => "invalid_input",
            Error::Parse { .. } => "parse_error",
        }
    }
}
