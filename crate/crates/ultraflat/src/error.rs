use thiserror::Error;

/// Failures of a CLI run, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("cannot parse {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] ultraflat_core::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// 1 for verification failures and refusals, 2 for usage or config problems.
    pub fn exit_code(&self) -> i32 {
        use ultraflat_core::Error as E;
        match self {
            Self::Verification(_) => 1,
            Self::Core(E::Parameter(_) | E::DegeneratePrefix(_) | E::Sector { .. } | E::SectorMismatch(..)) => 2,
            Self::Core(_) => 1,
            _ => 2,
        }
    }
}
