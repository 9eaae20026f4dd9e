//! Exact-arithmetic laboratory for image partition regularity (IPR) of
//! rational matrices, both ordinary and near zero.
//!
//! The crate is organised bottom-up:
//!
//! * [`numeric`]: exact rationals and dyadic rationals with even zero block
//!   analytics.
//! * [`matrix`]: sparse exact matrices, the standard matrix families and
//!   structural classifiers.
//! * [`mt`]: finite sums and Milliken–Taylor value sets.
//! * [`coloring`]: finite colorings of number grids.
//! * [`search`]: deterministic exhaustive searches and certificate
//!   verification.
//! * [`construct`]: executable versions of the constructive arguments
//!   (explicit witnesses, the finite extension pipeline, the segmented block
//!   solver and countable diagonal composition).

pub mod coloring;
pub mod construct;
pub mod matrix;
pub mod mt;
pub mod numeric;
pub mod search;

pub use coloring::{Coloring, ColoringKind, Domain, DomainRule};
pub use matrix::{CompressedTuple, SegmentedSpec, SparseMatrix};
pub use numeric::{Dyadic, Rational};
pub use search::{Certificate, SearchBounds};

/// Version string recorded in every certificate.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
