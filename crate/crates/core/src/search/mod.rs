//! Deterministic exhaustive searches and independent certificate
//! verification.
//!
//! Every search splits its tree into a fixed, input-determined list of
//! top-level branches. Branches may run on several workers, but results are
//! merged in branch order and node counts are accumulated in that order, so
//! the outcome (including the reported node count and whether the budget
//! ran out) is the same for any worker count.

mod avoid;
mod certificate;
mod parallel;
mod separation;
mod verify;
mod witness;

pub use avoid::{compactness_bound, extend_with_row, find_avoiding_coloring, BoundOutcome, ExtendReport};
pub use certificate::{Certificate, CertificateKind, EngineInfo, FsTarget, GeneratorRule, Payload};
pub use separation::{separation_depth_search, ColorDepth, DepthStatus, SeparationReport};
pub use verify::{verify_certificate, VerificationReport};
pub use witness::find_witness;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::ColoringError;
use crate::matrix::MatrixError;
use crate::numeric::Rational;

/// Node budget used when none is configured.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("node budget of {budget} exhausted after {nodes} nodes")]
    BudgetExhausted { budget: u64, nodes: u64 },
    #[error("image value {value} (row {row}) is outside the coloring domain")]
    ImageOutsideDomain { row: usize, value: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// Per-run knobs shared by all searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub budget: u64,
    pub workers: usize,
    /// Recorded in certificates; the searches themselves are not randomized.
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_BUDGET,
            workers: 1,
            seed: 0,
        }
    }
}

impl SearchOptions {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

/// Finite search space for a witness: one grid of admissible values per
/// column and an optional cap `ε` (every image entry must lie in `(0, ε)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBounds {
    pub grids: Vec<Vec<Rational>>,
    pub epsilon: Option<Rational>,
    pub budget: u64,
    /// Fail with [`SearchError::ImageOutsideDomain`] instead of skipping
    /// vectors whose image leaves the coloring domain.
    pub strict_domain: bool,
}

impl SearchBounds {
    /// The same grid for each of `ncols` columns.
    pub fn uniform(grid: Vec<Rational>, ncols: usize) -> Self {
        SearchBounds {
            grids: vec![grid; ncols],
            epsilon: None,
            budget: DEFAULT_BUDGET,
            strict_domain: false,
        }
    }

    /// `1..=n` for each column.
    pub fn integer_box(n: i64, ncols: usize) -> Self {
        Self::uniform((1..=n).map(Rational::from_integer).collect(), ncols)
    }

    pub fn with_epsilon(mut self, epsilon: Option<Rational>) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    fn validate(&self, ncols: usize) -> Result<(), SearchError> {
        if self.grids.len() != ncols {
            return Err(SearchError::InvalidInput(format!(
                "{} grids for {} columns",
                self.grids.len(),
                ncols
            )));
        }
        if self.grids.iter().any(Vec::is_empty) {
            return Err(SearchError::InvalidInput("empty variable grid".into()));
        }
        if let Some(e) = &self.epsilon {
            if !e.is_positive() {
                return Err(SearchError::InvalidInput("epsilon must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Result of a complete search: either something was found or the space
/// was exhausted within budget. Budget exhaustion is an error instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<T> {
    Found(T),
    Exhausted { nodes: u64 },
}

impl<T> Outcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Outcome::Found(t) => Some(t),
            Outcome::Exhausted { .. } => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Outcome::Found(_))
    }
}
