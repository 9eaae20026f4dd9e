use serde::{Deserialize, Serialize};

use super::ConstructError;
use crate::numeric::Rational;
use crate::search::{FsTarget, GeneratorRule};

/// Largest tail for which exhaustive subset search is attempted when the
/// generators do not dominate their tails.
const SUBSET_LIMIT: usize = 20;

/// Finite-sums tail `FS(z_tail, z_tail+1, ...)` of a finite, strictly
/// decreasing generator list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IpTailOracle {
    rule: GeneratorRule,
    generators: Vec<Rational>,
    tail: usize,
}

impl IpTailOracle {
    pub fn new(rule: GeneratorRule) -> Result<Self, ConstructError> {
        let generators = rule.generators();
        if generators.is_empty() {
            return Err(ConstructError::Empty);
        }
        if let Some(index) = generators.iter().position(|g| !g.is_positive()) {
            return Err(ConstructError::NotPositive { index });
        }
        if let Some(i) = generators.windows(2).position(|w| w[0] <= w[1]) {
            return Err(ConstructError::PremiseViolation { index: i + 1 });
        }
        Ok(IpTailOracle {
            rule,
            generators,
            tail: 0,
        })
    }

    /// Generators `4^-first, ..., 4^-(first + count - 1)`.
    pub fn base4(first: i64, count: usize) -> Result<Self, ConstructError> {
        Self::new(GeneratorRule::Base4 { first, count })
    }

    pub fn rule(&self) -> &GeneratorRule {
        &self.rule
    }

    pub fn generators(&self) -> &[Rational] {
        &self.generators
    }

    pub fn tail(&self) -> usize {
        self.tail
    }

    /// Generators still available.
    pub fn remaining(&self) -> usize {
        self.generators.len() - self.tail
    }

    pub fn with_tail(&self, tail: usize) -> Self {
        IpTailOracle {
            tail: tail.min(self.generators.len()),
            ..self.clone()
        }
    }

    /// Each generator exceeds the sum of all later ones, so greedy
    /// decomposition is exact.
    fn dominating(&self) -> bool {
        let mut rest = Rational::zero();
        for g in self.generators[self.tail..].iter().rev() {
            if *g <= rest {
                return false;
            }
            rest = &rest + g;
        }
        true
    }

    /// Indices (ascending) of distinct tail generators summing to `v`.
    pub fn decompose(&self, v: &Rational) -> Option<Vec<usize>> {
        if !v.is_positive() {
            return None;
        }
        if self.dominating() {
            let mut left = v.clone();
            let mut used = Vec::new();
            for (i, g) in self.generators.iter().enumerate().skip(self.tail) {
                if *g <= left {
                    left = &left - g;
                    used.push(i);
                    if left.is_zero() {
                        return Some(used);
                    }
                }
            }
            return None;
        }
        let tail = &self.generators[self.tail..];
        if tail.len() > SUBSET_LIMIT {
            return None;
        }
        (1u32..1 << tail.len()).find_map(|mask| {
            let idx: Vec<usize> = (0..tail.len()).filter(|i| mask >> i & 1 == 1).collect();
            let s: Rational = idx.iter().map(|&i| tail[i].clone()).sum();
            (s == *v).then(|| idx.into_iter().map(|i| i + self.tail).collect())
        })
    }

    pub fn contains(&self, v: &Rational) -> bool {
        self.decompose(v).is_some()
    }

    /// Oracle for the tail past every index in `used`; its members `b` satisfy
    /// `a + b` in this set whenever `a` is built from `used`.
    pub fn tail_after(&self, used: &[usize]) -> Result<Self, ConstructError> {
        if let Some(&index) = used.iter().find(|&&i| i < self.tail) {
            return Err(ConstructError::BeforeTail { index, tail: self.tail });
        }
        let next = used.iter().max().map_or(self.tail, |m| m + 1);
        Ok(self.with_tail(next))
    }

    /// All members, ascending. Only for tails of at most 20 generators.
    pub fn members(&self) -> Option<Vec<Rational>> {
        let tail = &self.generators[self.tail..];
        if tail.len() > SUBSET_LIMIT {
            return None;
        }
        let mut out: Vec<Rational> = (1u32..1 << tail.len())
            .map(|mask| {
                (0..tail.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| tail[i].clone())
                    .sum()
            })
            .collect();
        out.sort();
        out.dedup();
        Some(out)
    }

    pub fn target(&self) -> FsTarget {
        FsTarget {
            generators: self.rule.clone(),
            tail: self.tail,
        }
    }
}
