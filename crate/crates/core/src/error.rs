use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("catalog {path}, row {row}: {message}")]
    Catalog {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("git ({context}): {message}")]
    Git { context: String, message: String },

    #[error("{path}: {message}")]
    Maven { path: PathBuf, message: String },

    #[error("config: {message}")]
    Config { message: String },

    #[error("dataset {path}, row {row}: {message}")]
    DatasetRow {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("dataset {path}: {message}")]
    Dataset { path: PathBuf, message: String },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
