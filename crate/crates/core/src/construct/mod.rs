//! Constructive procedures: witnesses for the two example matrices, the
//! finite-plus-infinite extension pipeline, the segmented block solver and
//! the diagonal composition of block witnesses.
//!
//! Membership in central sets is replaced throughout by membership in
//! finite-sums tails ([`IpTailOracle`]); certificates produced this way are
//! flagged `surrogate`.

mod examples;
mod oracle;
mod pipeline;
mod segmented;

pub use examples::{ex16_guaranteed_index, ex16_obstruction, ex16_witness, ex17_witness};
pub use oracle::IpTailOracle;
pub use pipeline::{extension_pipeline, PipelineConfig, PipelineError, PipelineTrace, TruncationSolver, WitnessSource};
pub use segmented::{countable_diagonal_solve, segmented_solve, BlockSolution, SegmentedSolution};

use thiserror::Error;

use crate::matrix::MatrixError;
use crate::search::SearchError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("growth premise fails at index {index}")]
    GrowthViolation { index: usize },
    #[error("premise fails at index {index}")]
    PremiseViolation { index: usize },
    #[error("entry {index} is not positive")]
    NotPositive { index: usize },
    #[error("empty input")]
    Empty,
    #[error("prefix of length {len} is too short: the guaranteed index is {needed}")]
    PrefixTooShort { needed: usize, len: usize },
    #[error("oracle exhausted at block {block}: no generators left")]
    OracleExhausted { block: usize },
    #[error("block {block} has no solution within the oracle tail")]
    BlockUnsolvable { block: usize },
    #[error("depth {depth} exceeds the {blocks} available blocks")]
    DepthBeyondSpec { depth: usize, blocks: usize },
    #[error("target sets {first} and {second} share the member {member}")]
    DisjointnessViolation { first: usize, second: usize, member: String },
    #[error("block {block} failed: {report}")]
    BlockFailure { block: usize, report: String },
    #[error("generator index {index} lies before the current tail {tail}")]
    BeforeTail { index: usize, tail: usize },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}
