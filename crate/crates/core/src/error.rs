use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("singular block (condition estimate {cond:.3e})")]
    SingularBlock { cond: f64 },
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("not a bona fide covariance matrix: {0}")]
    NotBonaFide(String),
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),
    #[error("numeric inconsistency: {0}")]
    NumericInconsistency(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidShape(_) => "invalid_shape",
            Error::InvalidInput(_) => "invalid_input",
            Error::InvalidPartition(_) => "invalid_partition",
            Error::SingularBlock { .. } => "singular_block",
            Error::InvalidChannel(_) => "invalid_channel",
            Error::NotBonaFide(_) => "not_bona_fide",
            Error::ConvergenceFailure(_) => "convergence_failure",
            Error::NumericInconsistency(_) => "numeric_inconsistency",
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
