use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("site {site} out of range 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("chain length {sites} exceeds the configured maximum {max} (set FFMZM_LMAX to raise it)")]
    TooManySites { sites: usize, max: usize },

    #[error("chain length must be at least {min}, got {sites}")]
    TooFewSites { sites: usize, min: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty term list: the size of the zero operator is ambiguous")]
    EmptyTerms,

    #[error("{field}: {message}")]
    InvalidParameter { field: String, message: String },

    #[error("operator is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("two-qubit state is not entangled (|det T| = {det:e})")]
    ProductState { det: f64 },

    #[error("operator does not commute with the parity operator (residual {residual:e})")]
    ParityBreaking { residual: f64 },

    #[error("Hamiltonian is not quadratic in Majorana operators (higher-order residual {residual:e})")]
    NonQuadratic { residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("invalid model specification: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(field: &str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// True for the resource-guard family of errors (chain too long).
    pub fn is_resource_guard(&self) -> bool {
        matches!(self, Error::TooManySites { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
