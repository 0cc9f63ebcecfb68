//! Crate-wide error type.

use thiserror::Error;

use crate::arith::ArithError;
use crate::problems::Certificate;

#[derive(Debug, Clone, Error)]
pub enum PotlineError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("certificate kind {cert} does not apply to {instance}")]
    VariantMismatch { cert: String, instance: String },
    #[error("point off grid: {0}")]
    OffGrid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("step budget of {0} exhausted")]
    Exhausted(u64),
    #[error("enumeration of {size} items exceeds budget {budget}")]
    BudgetExceeded { size: String, budget: u64 },
    #[error("invalid reduction chain: {0}")]
    BadChain(String),
    #[error("instance is answered directly by {0:?}")]
    TrivialInstance(Box<Certificate>),
    #[error("certificate could not be mapped back: {0}")]
    UnmappableCert(String),
    #[error("grid sizes unavailable: {0}")]
    NoKappa(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for PotlineError {
    fn from(e: std::io::Error) -> Self {
        PotlineError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for PotlineError {
    fn from(e: serde_json::Error) -> Self {
        PotlineError::Parse(e.to_string())
    }
}

pub type Result<T, E = PotlineError> = std::result::Result<T, E>;
