use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("structural error: {0}")]
    Structure(String),

    #[error("zero total weight")]
    ZeroWeight,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("stencil at x = {x} with step {h} leaves the domain")]
    StencilOutOfDomain { x: f64, h: f64 },

    #[error("coincident nodes in divided difference")]
    CoincidentNodes,

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("bad function spec `{spec}`: {reason}")]
    BadFunctionSpec { spec: String, reason: String },

    #[error("table parse error at line {line}: {reason}")]
    TableParse { line: usize, reason: String },

    #[error("zero spread cannot be rescaled")]
    ZeroSpread,

    #[error("rescaled configuration does not fit in [{lo}, {hi}]")]
    Unplaceable { lo: f64, hi: f64 },

    #[error("infeasible constraint `{0}` after retry cap")]
    Infeasible(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("scenario file: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
