use std::path::PathBuf;

/// Errors raised anywhere in the pipeline.
///
/// Each variant maps onto one process exit code so the command-line tool can
/// report the failure class without inspecting messages.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("data error in {path}:{line}: {msg}")]
    DataAt {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("training failed on channel {channel}: {source}")]
    Channel {
        channel: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("method {method} failed at repeat {repeat}, fold {fold}: {source}")]
    Cell {
        method: String,
        repeat: usize,
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{0} is not implemented: reference ensembles DO/DOa are defined in external work and only reserved here")]
    NotImplemented(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 configuration, 3 data, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::NotImplemented(_) => 2,
            Error::Data(_) | Error::DataAt { .. } | Error::DegenerateSignal(_) | Error::Io { .. } => 3,
            Error::Numerical(_) => 4,
            Error::Channel { source, .. } | Error::Cell { source, .. } => source.exit_code(),
        }
    }
}
