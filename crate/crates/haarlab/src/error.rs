use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown group: {0}")]
    UnknownGroup(String),

    #[error("sets live on different groups: {0} vs {1}")]
    GroupMismatch(&'static str, &'static str),

    #[error("grids are not from the same family (cell sizes differ on axis {0})")]
    GridMismatch(usize),

    #[error("zero-measure input to {0}")]
    ZeroMeasure(&'static str),

    #[error("{0} requires a unimodular group, got {1}")]
    NonUnimodular(&'static str, &'static str),

    #[error("product image escapes the maximum grid extent on axis {axis} (|{extent:.3}| > {cap:.3})")]
    GridOverflow { axis: usize, extent: f64, cap: f64 },

    #[error("hypothesis not met for {check}: {detail}")]
    HypothesisNotMet { check: &'static str, detail: String },

    #[error("epsilon {eps} is not below the measure {measure} of the set; stabilizer would not be precompact")]
    EpsilonTooLarge { eps: f64, measure: f64 },

    #[error("set is not supported inside the kernel fiber")]
    NotInFiber,

    #[error("no quotient with compact kernel for group {0}")]
    NoQuotient(&'static str),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("serialization: {0}")]
    Serialize(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
