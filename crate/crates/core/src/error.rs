use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tangent map has rank < 2 at node {node}")]
    ImmersionViolation { node: usize },

    #[error("adapted frame is degenerate at node {node} (sin alpha = {sin_alpha:e})")]
    DegenerateFrame { node: usize, sin_alpha: f64 },

    #[error("point lies outside the affine chart U0")]
    OutsideChart,

    #[error("taming violated at t = {t}: margin {margin:e}")]
    TamingViolation { t: f64, margin: f64 },

    #[error("{what}: discrepancy {discrepancy:e} exceeds {tolerance:e}")]
    Consistency {
        what: String,
        discrepancy: f64,
        tolerance: f64,
    },

    #[error("unknown identifier `{0}`")]
    UnknownId(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Stable machine-readable code used in JSON reports and the C ABI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ImmersionViolation { .. } => "immersion_violation",
            Error::DegenerateFrame { .. } => "degenerate_frame",
            Error::OutsideChart => "outside_chart",
            Error::TamingViolation { .. } => "taming_violation",
            Error::Consistency { .. } => "numerical_consistency",
            Error::UnknownId(_) => "unknown_id",
            Error::InvalidInput(_) => "invalid_input",
            Error::Config(_) => "config_error",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
