use thiserror::Error;

/// Errors produced by the counting, sampling and generation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vote: {0}")]
    InvalidVote(String),

    #[error("invalid election: {0}")]
    InvalidElection(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("candidate {candidate} out of range for {m} candidates")]
    CandidateOutOfRange { candidate: usize, m: usize },

    #[error("swap radius {r} out of range [0, {max}]")]
    RadiusOutOfRange { r: u64, max: u64 },

    #[error("table does not cover {what}")]
    TableTooSmall { what: String },

    /// A configured limit on an exponential algorithm was exceeded.
    #[error("guard `{guard}` exceeded: {value} > {limit}{}", hint.as_deref().map(|h| format!(" ({h})")).unwrap_or_default())]
    GuardExceeded {
        guard: &'static str,
        value: u128,
        limit: u128,
        hint: Option<String>,
    },

    #[error("invalid cost function: {0}")]
    InvalidCosts(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("cache checksum mismatch: {0}")]
    Checksum(String),

    #[error("tied winners: {0:?}")]
    TiedWinners(Vec<usize>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
