use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomataError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("state limit of {0} exceeded during exploration")]
    StateLimit(usize),
}
