//! Finite sums and Milliken–Taylor value sets of finite term sequences.
//!
//! For a compressed tuple `a = <a_1, ..., a_m>` and terms `x_1, ..., x_n`,
//! `MT(a, x)` is the set of all `sum_i a_i * sum_{t in F_i} x_t` over block
//! sequences `F_1 < F_2 < ... < F_m` of nonempty index sets (every index of
//! `F_i` below every index of `F_{i+1}`). With `a = <1>` this is `FS(x)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::CompressedTuple;
use crate::numeric::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MtError {
    #[error("tuple of length {tuple} needs at least that many terms, got {terms}")]
    TupleTooLong { tuple: usize, terms: usize },
    #[error("term {index} is not positive: {value}")]
    NonPositiveTerm { index: usize, value: String },
    #[error("term sequence is empty")]
    Empty,
}

/// Ordered nonempty list of positive terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct TermSequence(Vec<Rational>);

impl TermSequence {
    pub fn new(terms: Vec<Rational>) -> Result<Self, MtError> {
        if terms.is_empty() {
            return Err(MtError::Empty);
        }
        if let Some((index, v)) = terms.iter().enumerate().find(|(_, v)| !v.is_positive()) {
            return Err(MtError::NonPositiveTerm {
                index,
                value: v.to_string(),
            });
        }
        Ok(TermSequence(terms))
    }

    pub fn from_integers(terms: &[i64]) -> Result<Self, MtError> {
        Self::new(terms.iter().map(|&t| Rational::from_integer(t)).collect())
    }

    pub fn terms(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scaled(&self, factor: &Rational) -> Result<Self, MtError> {
        Self::new(self.0.iter().map(|t| t * factor).collect())
    }
}

impl TryFrom<Vec<Rational>> for TermSequence {
    type Error = MtError;
    fn try_from(v: Vec<Rational>) -> Result<Self, Self::Error> {
        TermSequence::new(v)
    }
}

impl From<TermSequence> for Vec<Rational> {
    fn from(t: TermSequence) -> Self {
        t.0
    }
}

/// Enumeration result: sorted distinct values with their multiplicities
/// (how many block patterns produce each value).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MtSet {
    pub values: Vec<Rational>,
    pub multiplicities: Vec<u64>,
}

impl MtSet {
    fn from_counts(counts: BTreeMap<Rational, u64>) -> Self {
        let (values, multiplicities) = counts.into_iter().unzip();
        MtSet { values, multiplicities }
    }

    /// Number of block patterns, counted with multiplicity.
    pub fn total(&self) -> u64 {
        self.multiplicities.iter().sum()
    }

    pub fn contains(&self, v: &Rational) -> bool {
        self.values.binary_search(v).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Walks the indices once, deciding for each whether it is skipped,
    /// joins the open block or opens the next block.
    #[default]
    BlockSplit,
    /// Enumerates every labelling of the indices by `0..=m` and keeps the
    /// ones that describe a valid block pattern.
    SubsetFilter,
}

pub fn mt_enumerate(a: &CompressedTuple, x: &TermSequence) -> Result<MtSet, MtError> {
    mt_enumerate_with(a, x, Strategy::BlockSplit)
}

pub fn mt_enumerate_with(a: &CompressedTuple, x: &TermSequence, strategy: Strategy) -> Result<MtSet, MtError> {
    if a.len() > x.len() {
        return Err(MtError::TupleTooLong {
            tuple: a.len(),
            terms: x.len(),
        });
    }
    let counts = match strategy {
        Strategy::BlockSplit => block_split(a.entries(), x.terms()),
        Strategy::SubsetFilter => subset_filter(a.entries(), x.terms()),
    };
    Ok(MtSet::from_counts(counts))
}

/// `FS(x)`.
pub fn finite_sums(x: &TermSequence) -> MtSet {
    let one = CompressedTuple::new(vec![Rational::one()]).expect("<1> is compressed");
    mt_enumerate(&one, x).expect("one block always fits")
}

fn block_split(a: &[Rational], x: &[Rational]) -> BTreeMap<Rational, u64> {
    fn rec(
        a: &[Rational],
        x: &[Rational],
        pos: usize,
        block: usize,
        acc: &Rational,
        out: &mut BTreeMap<Rational, u64>,
    ) {
        let m = a.len();
        if pos == x.len() {
            if block == m {
                *out.entry(acc.clone()).or_default() += 1;
            }
            return;
        }
        if m - block > x.len() - pos {
            return;
        }
        rec(a, x, pos + 1, block, acc, out);
        if block >= 1 {
            rec(a, x, pos + 1, block, &(acc + &(&a[block - 1] * &x[pos])), out);
        }
        if block < m {
            rec(a, x, pos + 1, block + 1, &(acc + &(&a[block] * &x[pos])), out);
        }
    }
    let mut out = BTreeMap::new();
    rec(a, x, 0, 0, &Rational::zero(), &mut out);
    out
}

fn subset_filter(a: &[Rational], x: &[Rational]) -> BTreeMap<Rational, u64> {
    let m = a.len();
    let n = x.len();
    let base = m + 1;
    let total = base.pow(n as u32);
    let mut out = BTreeMap::new();
    let mut labels = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for l in labels.iter_mut() {
            *l = c % base;
            c /= base;
        }
        // nonzero labels must read 1, ..., 1, 2, ..., m with no gaps
        let mut last = 0;
        let valid = labels.iter().filter(|&&l| l > 0).all(|&l| {
            let ok = l == last || l == last + 1;
            last = l;
            ok
        }) && last == m;
        if !valid {
            continue;
        }
        let value: Rational = labels
            .iter()
            .zip(x)
            .filter(|(l, _)| **l > 0)
            .map(|(l, t)| &a[l - 1] * t)
            .sum();
        *out.entry(value).or_default() += 1;
    }
    out
}
