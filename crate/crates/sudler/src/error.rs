use thiserror::Error;

/// Failure to parse an α specification, a grid, or a hex-float literal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at position {position} in {input:?}")]
pub struct ParseError {
    pub input: String,
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(input: &str, position: usize, message: impl Into<String>) -> Self {
        Self {
            input: input.to_owned(),
            position,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("working_bits must be at least 64, got {0}")]
    Precision(usize),

    #[error("precision budget violated: {0}")]
    PrecisionBudget(String),

    #[error("index {requested} lies beyond the last convergent {last} of a rational α")]
    RationalExhausted { requested: usize, last: usize },

    #[error("partial quotient a_{0} overflows 64 bits")]
    QuotientOverflow(usize),

    #[error("operation requires a periodic α")]
    NotPeriodic,

    #[error("{n} is outside [0, {bound})")]
    OutOfRange { n: String, bound: String },

    #[error("invalid Ostrowski digits: {0}")]
    InvalidDigits(String),

    #[error("budget exceeded: {what} = {value} > {limit}")]
    Budget { what: String, value: String, limit: String },

    #[error("pole: {0}")]
    Pole(String),

    #[error("vanishing factor in {0}")]
    ZeroFactor(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("fixtures: {0}")]
    Fixtures(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
