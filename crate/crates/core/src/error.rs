use thiserror::Error;

use crate::aggregator::{Power, Sense};
use crate::losses::LossKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sentiment profile: {0}")]
    InvalidProfile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("p = {p} is outside the fair range for {sense}")]
    UnfairPower { p: Power, sense: Sense },

    #[error("expected a {expected} spec, got {actual}")]
    WrongSense { expected: Sense, actual: Sense },

    #[error("{0} loss is not convex and has no subgradient")]
    NonConvexLoss(LossKind),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("iteration count {n} exceeds the cap of {cap}; try a larger epsilon")]
    IterationCap { n: u64, cap: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
