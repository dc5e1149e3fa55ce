use std::path::PathBuf;

use crate::model::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid aggregate: {0}")]
    InvalidSpec(ValidationReport),

    #[error("energy must be non-negative, got {0} cm^-1")]
    NegativeEnergy(f64),

    #[error("sites {0} and {1} have coincident positions")]
    CoincidentPositions(usize, usize),

    #[error("matrix is not symmetric (max |A - A^T| = {0:e})")]
    NotSymmetric(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),

    #[error("times must be sorted ascending and finite")]
    UnsortedTimes,

    #[error("time step must be positive, got {0}")]
    InvalidTimeStep(f64),

    #[error(
        "classical mode {index} is unstable: eigenvalue {eigenvalue:e} of the oscillator \
         frequency matrix is not positive"
    )]
    UnstableMode { index: usize, eigenvalue: f64 },

    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("Bessel J_{order}({x}) outside validated range (|n| <= 200, 0 <= x <= 500)")]
    BesselRange { order: i32, x: f64 },

    #[error("trajectory has no amplitudes")]
    MissingAmplitudes,

    #[error("trajectories do not share a time grid / site count: {0}")]
    GridMismatch(String),

    #[error("trajectory too short for fit: {0} usable points (need 5)")]
    TooShort(usize),

    #[error("trajectory must be in dimensionless chain time")]
    WrongTimeUnit,

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Numerical failures are distinguished from usage errors by the CLI.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::UnstableMode { .. } | Error::NoConvergence(_) | Error::BesselRange { .. }
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
