use thiserror::Error;

/// Errors raised by the symbolic engine, the reference solver and the analysis layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mixed rates: convolution of terms with rates {left} and {right} has no supported closed form")]
    MixedRates { left: String, right: String },

    #[error("zero rate: full-line integral of a term without exponential decay diverges")]
    ZeroRate,

    #[error("out of class: power x^{power} leaves the polynomial-exponential class")]
    OutOfClass { power: i64 },

    #[error("degree overflow: exponent {exponent} exceeds the cap {cap}")]
    DegreeOverflow { exponent: u32, cap: u32 },

    #[error("term budget exceeded: {terms} monomials (budget {budget})")]
    TermBudget { terms: usize, budget: usize },

    #[error("index {index} out of range (series has {len} components)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("not contractive: contraction constant {constant} >= 1")]
    NotContractive { constant: f64 },

    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    #[error("two-dimensional problems are not supported here")]
    Unsupported2D,

    #[error("dimension mismatch: problem is {problem}-D, density is {density}-D")]
    DimensionMismatch { problem: usize, density: usize },

    #[error("instability: |u| exceeded {limit:e} at t = {time}")]
    Instability { time: f64, limit: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
