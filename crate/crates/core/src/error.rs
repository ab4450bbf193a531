use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty graph")]
    EmptyGraph,

    #[error("degenerate graph: no edges")]
    NoEdges,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid block model: {0}")]
    InvalidSpec(String),

    #[error("target degree infeasible: {clamped} of {total} off-diagonal probabilities exceed 1 after scaling")]
    TargetDegreeInfeasible { clamped: usize, total: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver did not converge after {iterations} iterations ({converged} of {wanted} values converged)")]
    NotConverged {
        iterations: usize,
        wanted: usize,
        converged: usize,
        /// Best available approximations, converged or not.
        partial: Vec<num_complex::Complex64>,
        residuals: Vec<f64>,
    },

    #[error("factorization broke down at pivot {pivot}")]
    Breakdown { pivot: usize },

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("dataset `{name}` is not bundled; place `{file}` in $SPECK_DATA_DIR")]
    DatasetUnavailable { name: String, file: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
