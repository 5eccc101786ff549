use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension {0}: only n = 2 and n = 4 are supported")]
    UnsupportedDimension(usize),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid cutoffs: {0}")]
    InvalidCutoffs(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid gauge data: {0}")]
    InvalidGauge(String),
    #[error("field evaluated on the jump slice of a sharp profile")]
    OnJumpSlice,
    #[error("operator is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("sharp profile cannot be assembled as a bulk Galerkin operator; smooth it or use the transverse solver")]
    SharpProfile,
    #[error("configuration does not have product structure: {0}")]
    NotProduct(String),
    #[error("spectrum carries no chirality data")]
    NoChirality,
    #[error("zero mode present at |lambda| = {0:.3e}; eta is undefined")]
    ZeroMode(f64),
    #[error("eigenvalue crossing at a family endpoint (s = {0})")]
    EndpointCrossing(f64),
    #[error("eigensolver did not converge: max residual {0:.3e}")]
    NoConvergence(f64),
    #[error("quadrature needs {needed} family samples, family has {have}")]
    InsufficientSamples { needed: usize, have: usize },
    #[error("form degree mismatch: {0}")]
    Degree(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
