use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point {x} lies outside [0, 1]")]
    OutOfDomain { x: f64 },

    #[error("dimension {j} outside the prior range [{min}, {max}]")]
    DimensionOutOfRange { j: usize, min: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("value outside the prior support: {0}")]
    OutsideSupport(String),

    #[error("exact enumeration needs {needed:.3e} configurations but the budget is {budget}")]
    EnumerationBudget { needed: f64, budget: u64 },

    #[error("slot {slot} has no candidate with positive weight")]
    ZeroWeightSlot { slot: usize },

    #[error("Monte Carlo denominator estimate underflowed or is not finite")]
    DegenerateDenominator,

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }

    /// True for failures caused by the numbers themselves rather than by
    /// configuration or input shape.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateDenominator | Error::Singular(_) | Error::Quadrature(_)
        )
    }
}
