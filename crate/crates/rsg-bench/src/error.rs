use thiserror::Error;

/// Failures split by exit code: bad input (1) versus a failed run (2).
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 1,
            BenchError::Runtime(_) => 2,
        }
    }
}

impl From<rsg_core::Error> for BenchError {
    fn from(e: rsg_core::Error) -> Self {
        use rsg_core::Error as E;
        match e {
            E::UnknownScenario(_) | E::Parse(_) | E::NoTableEntry { .. } => BenchError::Config(e.to_string()),
            other => BenchError::Runtime(other.to_string()),
        }
    }
}

pub type BenchResult<T> = Result<T, BenchError>;
