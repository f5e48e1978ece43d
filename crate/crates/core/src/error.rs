use std::path::PathBuf;

/// Errors produced by the linkability toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },

    #[error("empty model")]
    EmptyModel,

    #[error("KL undefined: token {token:?} has mass in P but not in Q")]
    KlUndefined { token: String },

    #[error("unknown profile {0:?}")]
    UnknownProfile(String),

    #[error("degenerate: all candidates identical to target")]
    DegenerateChoice,

    #[error("bound undefined at zero matching distance")]
    ZeroMatchingDistance,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("observation impossible under prior")]
    ZeroEvidence,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
