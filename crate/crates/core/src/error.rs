use thiserror::Error;

use crate::lattice::Parity;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("strip width must be a positive odd integer, got {0}")]
    InvalidWidth(i64),

    #[error("walker count {n} out of range 1..={max} for strip width {width}")]
    WalkerCount { n: usize, max: usize, width: i64 },

    #[error("invalid occupation vector {heights:?}: {reason}")]
    InvalidOccupation { heights: Vec<i64>, reason: String },

    #[error(
        "parity mismatch: start parity {start} cannot reach end parity {end} in {steps} steps"
    )]
    ParityMismatch {
        start: Parity,
        end: Parity,
        steps: u32,
    },

    #[error("endpoint lists differ in length: {start} start heights vs {end} end heights")]
    EndpointLength { start: usize, end: usize },

    #[error("invalid weight configuration: {0}")]
    Config(String),

    #[error("invalid rational literal {0:?}")]
    RationalLiteral(String),

    #[error("one-walk eigenbasis is incomplete: {0}")]
    Completeness(String),

    #[error("degenerate spectrum: two-step eigenvalue {0:e} has zero modulus")]
    DegenerateSpectrum(f64),

    #[error("relation {relation} violated at index {index}: residual {residual:e} exceeds {tolerance:e}")]
    Verification {
        relation: String,
        index: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("one-wall value did not stabilise: width {width} gave {first}, width {next_width} gave {second}")]
    Stabilization {
        width: i64,
        first: String,
        next_width: i64,
        second: String,
    },
}
