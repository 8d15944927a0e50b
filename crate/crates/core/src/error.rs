use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("dangling reference to block `{0}`")]
    DanglingReference(String),
    #[error("invalid netlist: {0}")]
    InvalidNetlist(String),
    #[error("combinational cycle through block `{0}`")]
    CombinationalCycle(String),
    #[error("invalid architecture: {0}")]
    InvalidArch(String),
    #[error("insufficient capacity: {0}")]
    Capacity(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Report(String),
    #[error("non-finite cost ({0})")]
    NonFinite(&'static str),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI, one per failure category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 3,
            Error::Parse { .. }
            | Error::DanglingReference(_)
            | Error::InvalidNetlist(_)
            | Error::CombinationalCycle(_) => 4,
            Error::InvalidArch(_) | Error::Config(_) => 5,
            Error::Capacity(_) => 6,
            Error::Report(_) => 7,
            Error::NonFinite(_) => 70,
        }
    }
}
