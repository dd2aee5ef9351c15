use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical parameter lies outside its admissible range.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("{what} has dimension {dim}, above the cap of {cap}")]
    Size { what: String, dim: u64, cap: u64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no convergence after {iterations} iterations (last residuals: {residuals:?})")]
    Convergence { iterations: usize, residuals: Vec<f64> },

    #[error("no crossing of {threshold} found; curve spans [{min}, {max}] over J in [{j_min}, {j_max}]")]
    NoCrossing {
        threshold: f64,
        min: f64,
        max: f64,
        j_min: f64,
        j_max: f64,
    },

    #[error("eigenvalue selection kept {kept} states, expected {expected}")]
    Selection { kept: usize, expected: usize },

    #[error("ambiguous level identification: {0}")]
    Identification(String),

    #[error("singular denominator: {0}")]
    Singular(String),

    #[error("realization {index}: {source}")]
    Realization {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
