//! Exact scalars: arbitrary precision rationals and dyadic rationals with
//! binary-support analytics.

mod dyadic;
mod rational;

pub use dyadic::{phi_even_zero_blocks, phi_of_mantissa, window_grid, Dyadic};
pub use rational::{parse_list, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("cannot parse rational literal {0:?}")]
    Parse(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("{0} is not a dyadic rational (denominator has an odd prime factor)")]
    NotDyadic(String),
    #[error("{0} is not positive")]
    NotPositive(String),
    #[error("even zero blocks are undefined for an empty support")]
    EmptySupport,
    #[error("support contains a repeated exponent")]
    DuplicateExponent,
}
