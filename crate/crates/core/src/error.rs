use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("derivative order {0} is not supported (maximum is 2)")]
    UnsupportedOrder(u32),

    #[error("ratio is undefined for an identically zero field")]
    UndefinedRatio,

    #[error("no Sobolev embedding: p = {p} is not below the dimension {dim}")]
    NoEmbedding { dim: u32, p: f64 },

    #[error("invalid function family: {0}")]
    InvalidFamily(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("linear solver stalled after {iterations} iterations (residual {residual:.3e})")]
    LinearSolverStall { iterations: usize, residual: f64 },

    #[error(
        "Picard iteration diverged at iteration {iteration} (update {update:.3e}); \
         try a smaller forcing amplitude or a larger viscosity"
    )]
    NonlinearDivergence { iteration: usize, update: f64 },

    #[error("inconsistent Schauder ratio: zero data with a nonzero state")]
    Inconsistent,

    #[error("malformed field file: {0}")]
    Format(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            domain,
        }
    }
}
