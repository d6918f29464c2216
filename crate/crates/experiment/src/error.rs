use csst_core::CsstError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExpError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CsstError),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{path}: {msg}")]
    Data { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, ExpError>;

impl ExpError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        ExpError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn data(path: impl AsRef<std::path::Path>, msg: impl ToString) -> Self {
        ExpError::Data {
            path: path.as_ref().display().to_string(),
            msg: msg.to_string(),
        }
    }

    /// 2 config / invalid input, 3 resource cap, 4 numerical failure, 1 I/O and data files.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExpError::Config(_) => 2,
            ExpError::Core(e) => match e {
                CsstError::InvalidArgument(_) | CsstError::Parse(_) => 2,
                CsstError::ResourceLimit(_) => 3,
                CsstError::Numerical(_)
                | CsstError::NotDiagonalizable { .. }
                | CsstError::InfeasibleTolerance { .. }
                | CsstError::UndefinedSignal => 4,
                CsstError::Io(_) => 1,
            },
            ExpError::Io { .. } | ExpError::Data { .. } => 1,
        }
    }
}
