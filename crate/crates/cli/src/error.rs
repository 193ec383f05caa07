use std::path::PathBuf;

use thiserror::Error;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ffemu_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("bundle member {member} is missing from {}", dir.display())]
    MissingMember { member: String, dir: PathBuf },
    #[error("no data: {0}")]
    EmptyData(String),
}

impl CliError {
    /// 1 configuration, 2 numerical failure, 3 IO.
    pub fn exit_code(&self) -> i32 {
        use ffemu_core::Error as E;
        match self {
            CliError::Io { .. } | CliError::Csv { .. } | CliError::MissingMember { .. } | CliError::EmptyData(_) => 3,
            CliError::Core(e) => match e {
                E::Config(_) | E::Parse { .. } | E::Model(_) | E::Shape(_) => 1,
                E::Io { .. } => 3,
                E::Linalg(_) | E::Fuzzy(_) | E::Optim(_) | E::Domain(_) | E::Diagnostics(_) | E::Level { .. } => 2,
            },
        }
    }
}
