use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported pattern order {order} (supported: 1..={max})")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("pattern code {code} is out of range for order {order}")]
    InvalidCode { code: u64, order: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("pattern orders differ: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("input mismatch: {0}")]
    InputMismatch(String),

    /// `1 - sum_pi q_x[pi] q_y[pi]` vanished; both inputs are concentrated on one pattern.
    #[error("degenerate denominator: 1 - sum q_x*q_y = {denominator:e} (both inputs concentrate on a single pattern)")]
    DegenerateDenominator { denominator: f64 },

    #[error("degenerate marginal dominance probability p_x = {p_x}, p_y = {p_y}")]
    DegenerateMarginal { p_x: f64, p_y: f64 },

    #[error("bandwidth {bandwidth} must be smaller than the number of terms {len}")]
    InvalidBandwidth { bandwidth: usize, len: usize },

    #[error("covariance matrix is numerically singular (min/max eigenvalue ratio {ratio:e})")]
    SingularCovariance { ratio: f64 },

    #[error("correlation {0} lies outside [-1, 1]")]
    InvalidCorrelation(f64),

    #[error("invalid covariance: {0}")]
    InvalidCovariance(String),

    #[error("parameters violate stationarity: {0}")]
    NonStationary(String),

    #[error("invalid config key `{key}`: {message}")]
    InvalidConfig { key: String, message: String },
}

impl Error {
    /// Stable variant name, used by the CLI when reporting failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::UnsupportedOrder { .. } => "UnsupportedOrder",
            Error::InvalidCode { .. } => "InvalidCode",
            Error::InsufficientData(_) => "InsufficientData",
            Error::OrderMismatch { .. } => "OrderMismatch",
            Error::InputMismatch(_) => "InputMismatch",
            Error::DegenerateDenominator { .. } => "DegenerateDenominator",
            Error::DegenerateMarginal { .. } => "DegenerateMarginal",
            Error::InvalidBandwidth { .. } => "InvalidBandwidth",
            Error::SingularCovariance { .. } => "SingularCovariance",
            Error::InvalidCorrelation(_) => "InvalidCorrelation",
            Error::InvalidCovariance(_) => "InvalidCovariance",
            Error::NonStationary(_) => "NonStationary",
            Error::InvalidConfig { .. } => "InvalidConfig",
        }
    }

    pub(crate) fn config(key: &str, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.to_string(),
            message: message.into(),
        }
    }
}
