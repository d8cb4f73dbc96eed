use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("community {community}: vertex {vertex} outside [1, {n}]")]
    VertexOutOfRange { community: usize, vertex: u32, n: usize },

    #[error("invalid community: {0}")]
    InvalidCommunity(String),

    #[error("invalid model spec: {}", .0.messages.join("; "))]
    InvalidSpec(ValidationReport),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("graph on {n} vertices exceeds the brute-force limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("enumeration needs {needed} configurations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
