use sabr_smile::SabrError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Numerical(#[from] SabrError),

    #[error("{0} Monte Carlo point(s) outside the no-arbitrage band")]
    OutOfBand(usize),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 config, 3 numerical failure, 4 MC out-of-band.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::OutOfBand(_) => 4,
        }
    }
}

pub(crate) fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub type Result<T> = std::result::Result<T, CliError>;
