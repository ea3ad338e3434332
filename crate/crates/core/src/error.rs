use std::io;

use thiserror::Error;

/// Errors produced by the allocation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("assignment has {found} entries but the set has {expected} sources")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qp {qp} of source {index} is outside [{min}, {max}]")]
    QpOutOfRange {
        index: usize,
        qp: u8,
        min: u8,
        max: u8,
    },

    #[error("budget of {budget} bits is below the cheapest encoding ({minimum} bits)")]
    InfeasibleBudget { budget: u64, minimum: u64 },

    #[error("no assignment satisfies the constraint")]
    NoFeasibleAssignment,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid rate-distortion table: {0}")]
    InvalidTable(String),

    #[error("frame geometry: {0}")]
    FrameGeometry(String),

    #[error("inter frame requires a reference frame")]
    MissingReference,

    #[error("index {index} out of range for {len} macroblocks")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("enumeration of {count} assignments exceeds the limit of {limit}")]
    InstanceTooLarge { count: u128, limit: u128 },

    #[error("frame quality is not available for this source set")]
    QualityUnavailable,

    #[error("malformed bitstream: {0}")]
    Bitstream(String),

    #[error("input truncated: need {needed} bytes, found {found}")]
    Truncated { needed: u64, found: u64 },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for command-line front ends: 1 infeasible
    /// constraint, 2 I/O, 3 anything the caller specified wrongly.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InfeasibleBudget { .. } | Error::NoFeasibleAssignment => 1,
            Error::Io(_) | Error::Csv(_) | Error::Truncated { .. } => 2,
            _ => 3,
        }
    }
}
