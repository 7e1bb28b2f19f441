//! The constructive chain behind precompleteness: reduce a function to a
//! unary one, find a set-enlarging map on a positive-density image, build a
//! binary map onto ℕ from a sparse rectangle family, and invert it.

mod inverse;
mod largeset;
mod onto;
mod pipeline;
mod unarize;

pub use inverse::{generate_function, right_inverse, Generated, GeneratedSummary, RightInverse};
pub use largeset::{
    build_large_set_map, counting_identity_holds, map_from_intervals, select_intervals, tail_density_estimate, LargeSetChecks,
    LargeSetMap,
};
pub use onto::{
    build_onto_construction, d_block_rows, verify_onto, verify_onto_preserves_ideal, DBlockRow, IdealRow,
    OntoBlock, OntoConstruction, OntoVerification, OnePair,
};
pub use pipeline::{run_precompleteness_pipeline, PipelineConfig, PipelineError, PipelineReport, PipelineResult};
pub use unarize::{index_map, unarize, Unarization, UnarizationReport};

use thiserror::Error;

use crate::func::FunError;
use crate::natset::SetError;
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrecompleteError {
    #[error("set has {found} elements below {horizon}, too few for the construction")]
    SetTooSmall { found: u64, horizon: u64 },
    #[error("density estimate {estimate} does not exceed 3/{e}")]
    PremiseUnmet { estimate: Rat, e: u64 },
    #[error("only {found} of {wanted} intervals fit below {horizon}")]
    NotEnoughIntervals { found: usize, wanted: usize, horizon: u64 },
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("no preimage of {n} among pairs below {horizon}")]
    NoPreimage { n: u64, horizon: u64 },
    #[error("target value {value} at {at:?} lies outside the right-inverse table (size {size})")]
    RTableGap { value: u64, at: Vec<u64>, size: u64 },
    #[error("expected a function of arity {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Fun(#[from] FunError),
}
