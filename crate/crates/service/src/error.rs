use puzzlers_core::PuzzleError;
use puzzlers_llm::{BridgeError, PromptError, ProviderError};
use thiserror::Error;

use crate::session::Mode;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ServiceError {
    #[error("unknown puzzle {0:?}")]
    UnknownPuzzle(String),
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("{operation} is not available in {mode:?} mode")]
    WrongMode { operation: &'static str, mode: Mode },
    #[error("an AI request is already running for this session")]
    Busy,
    #[error("no AI attempt to check yet")]
    NoAttempt,
    #[error("the last AI attempt did not contain a readable grid")]
    UnparsedAttempt,
    #[error("unknown model {0:?}")]
    UnknownModel(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Puzzle(#[from] PuzzleError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

impl From<BridgeError> for ServiceError {
    fn from(e: BridgeError) -> Self {
        match e {
            BridgeError::Prompt(p) => ServiceError::Prompt(p),
            BridgeError::Provider(p) => ServiceError::Provider(p),
        }
    }
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownPuzzle(_) => "unknown_puzzle",
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::WrongMode { .. } => "wrong_mode",
            ServiceError::Busy => "busy",
            ServiceError::NoAttempt => "no_attempt",
            ServiceError::UnparsedAttempt => "unparsed_attempt",
            ServiceError::UnknownModel(_) => "unknown_model",
            ServiceError::InvalidRequest(_) => "invalid_request",
            ServiceError::Puzzle(e) => e.code(),
            ServiceError::Prompt(e) => e.code(),
            ServiceError::Provider(e) => e.code(),
        }
    }

    /// HTTP status class for the wire API.
    pub fn status(&self) -> u16 {
        match self {
            ServiceError::UnknownPuzzle(_) | ServiceError::UnknownSession(_) => 404,
            ServiceError::WrongMode { .. }
            | ServiceError::Busy
            | ServiceError::NoAttempt
            | ServiceError::UnparsedAttempt => 409,
            ServiceError::UnknownModel(_)
            | ServiceError::Puzzle(_)
            | ServiceError::Prompt(_) => 422,
            ServiceError::InvalidRequest(_) => 400,
            ServiceError::Provider(ProviderError::Timeout(_)) => 504,
            ServiceError::Provider(ProviderError::CredentialMissing(_)) => 503,
            ServiceError::Provider(_) => 502,
        }
    }
}
