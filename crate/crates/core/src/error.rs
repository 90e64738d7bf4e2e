use thiserror::Error;

#[derive(Debug, Error)]
pub enum IkError {
    #[error("invalid robot model: {0}")]
    InvalidModel(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown algorithm `{0}` (expected one of pso, cro, bes, efo, mvo, nro)")]
    UnknownAlgorithm(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
}
