use thiserror::Error;

use crate::Exponent;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("series has no invertible constant term")]
    NonUnitLeadingTerm,

    #[error("grid denominator {den} exceeds the configured maximum {max}")]
    GridOverflow { den: i64, max: i64 },

    #[error("coefficient of q^({exponent}) requested beyond the truncation order q^({cap})")]
    BeyondCap { exponent: Exponent, cap: Exponent },

    #[error("divergent infinite product: {0}")]
    DivergentProduct(String),

    #[error("recovered product exponent at q^({exponent}) is not rational")]
    NonRationalExponent { exponent: Exponent },

    #[error("summation does not terminate below the cap: {0}")]
    NonTerminating(String),

    #[error("pole in lower parameter: {0}")]
    PoleInLowerParameter(String),

    #[error("factor cannot be expanded formally: {0}")]
    DivergentFactor(String),

    #[error("z-window of half-width {needed} exceeds the bound {max}")]
    WindowOverflow { needed: i64, max: i64 },

    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { msg: String, line: usize, column: usize },

    #[error("integer coefficient overflow during summation")]
    CoefficientOverflow,

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(msg: impl Into<String>, input: &str, offset: usize) -> Self {
        let before = &input[..offset.min(input.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
        Error::Parse { msg: msg.into(), line, column }
    }
}
