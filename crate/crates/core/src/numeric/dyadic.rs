use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use super::{NumericError, Rational};

/// Nonnegative dyadic rational stored as the set of exponents `t` whose
/// bit `2^t` is set.
///
/// The support is kept sorted in strictly decreasing order, so the first
/// element is the start (most significant bit) and the last is the end.
/// The empty support is the value zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Dyadic {
    support: Vec<i64>,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic::default()
    }

    /// Builds a dyadic from a set of exponents. Duplicates are rejected
    /// because a support is a set and `2^t + 2^t` would carry.
    pub fn from_support<I: IntoIterator<Item = i64>>(exponents: I) -> Result<Self, NumericError> {
        let mut support: Vec<i64> = exponents.into_iter().collect();
        let set: BTreeSet<i64> = support.iter().copied().collect();
        if set.len() != support.len() {
            return Err(NumericError::DuplicateExponent);
        }
        support.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Dyadic { support })
    }

    /// Single bit `2^t`.
    pub fn bit(t: i64) -> Self {
        Dyadic { support: vec![t] }
    }

    pub fn from_rational(q: &Rational) -> Result<Self, NumericError> {
        if !q.is_positive() {
            return Err(NumericError::NotPositive(q.to_string()));
        }
        let shift = q
            .denominator_log2()
            .ok_or_else(|| NumericError::NotDyadic(q.to_string()))? as i64;
        let numer = q.numer().magnitude();
        let mut support: Vec<i64> = (0..numer.bits())
            .filter(|&b| numer.bit(b))
            .map(|b| b as i64 - shift)
            .collect();
        support.reverse();
        Ok(Dyadic { support })
    }

    pub fn to_rational(&self) -> Rational {
        let Some(&end) = self.support.last() else {
            return Rational::zero();
        };
        let mut numer = BigInt::from(0);
        for &t in &self.support {
            numer += BigInt::one() << (t - end) as u64;
        }
        Rational::from_integer(numer) * Rational::pow2(end)
    }

    /// Exponents in decreasing order.
    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn is_positive(&self) -> bool {
        !self.support.is_empty()
    }

    /// Position of the most significant bit.
    pub fn start(&self) -> Option<i64> {
        self.support.first().copied()
    }

    /// Position of the least significant bit.
    pub fn end(&self) -> Option<i64> {
        self.support.last().copied()
    }

    /// True iff the value lies in the open interval (0, 2).
    pub fn in_unit_pair_interval(&self) -> bool {
        matches!(self.start(), Some(s) if s <= 0)
    }

    /// Multiplies by `2^k`.
    pub fn shift(&self, k: i64) -> Self {
        Dyadic {
            support: self.support.iter().map(|t| t + k).collect(),
        }
    }

    /// Number of maximal zero runs of positive even length strictly between
    /// the start and the end of the binary expansion.
    pub fn phi(&self) -> Result<u64, NumericError> {
        if self.support.is_empty() {
            return Err(NumericError::EmptySupport);
        }
        Ok(self
            .support
            .windows(2)
            .filter(|w| {
                let zeros = w[0] - w[1] - 1;
                zeros > 0 && zeros % 2 == 0
            })
            .count() as u64)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({:?} = {})", self.support, self.to_rational())
    }
}

/// Number of even zero blocks of a positive dyadic given as a rational.
pub fn phi_even_zero_blocks(q: &Rational) -> Result<u64, NumericError> {
    Dyadic::from_rational(q)?.phi()
}

/// Even-zero-block count for an integer mantissa, used by the fixed-point
/// search kernels where every value is `m * 2^low` for a shared `low`.
/// Returns 0 for `m == 0`.
pub fn phi_of_mantissa(m: u64) -> u32 {
    if m == 0 {
        return 0;
    }
    let mut bits = m >> m.trailing_zeros();
    let mut count = 0;
    while bits > 1 {
        // skip the lowest one bit, then measure the zero run above it
        bits >>= 1;
        let zeros = bits.trailing_zeros();
        if zeros > 0 && zeros.is_multiple_of(2) {
            count += 1;
        }
        bits >>= zeros;
    }
    count
}

/// All dyadics whose support is a nonempty subset of `[low, high]`, in
/// ascending order of value.
pub fn window_grid(low: i64, high: i64) -> Vec<Rational> {
    assert!(low <= high && high - low < 62, "window too wide");
    let width = (high - low + 1) as u32;
    let unit = Rational::pow2(low);
    (1u64..(1u64 << width))
        .map(|m| Rational::from_integer(m) * &unit)
        .collect()
}
