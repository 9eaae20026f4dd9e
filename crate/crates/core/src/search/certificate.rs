use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::matrix::SparseMatrix;
use crate::numeric::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// A vector whose image is monochromatic (or lies in a target set).
    Witness,
    /// A coloring of a finite domain with no monochromatic image.
    Refutation,
    /// Least `N` such that every `r`-coloring of `1..=N` has a
    /// monochromatic image.
    Bound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineInfo {
    pub version: String,
    pub seed: u64,
}

impl EngineInfo {
    pub fn new(seed: u64) -> Self {
        EngineInfo {
            version: crate::ENGINE_VERSION.to_string(),
            seed,
        }
    }
}

/// Generators `z_0 > z_1 > ...` of a finite-sums target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorRule {
    /// `z_i = 4^-(first + i)` for `i < count`.
    Base4 { first: i64, count: usize },
    /// Strictly decreasing positive generators.
    Explicit { generators: Vec<Rational> },
}

impl GeneratorRule {
    pub fn len(&self) -> usize {
        match self {
            GeneratorRule::Base4 { count, .. } => *count,
            GeneratorRule::Explicit { generators } => generators.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn generators(&self) -> Vec<Rational> {
        match self {
            GeneratorRule::Base4 { first, count } => {
                (0..*count).map(|i| Rational::pow2(-2 * (first + i as i64))).collect()
            }
            GeneratorRule::Explicit { generators } => generators.clone(),
        }
    }
}

/// Finite sums of distinct generators with index at least `tail`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsTarget {
    pub generators: GeneratorRule,
    pub tail: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Witness {
        x: Vec<Rational>,
        image: Vec<Rational>,
        /// Common color of the image under the certificate's coloring.
        color: Option<usize>,
        /// Target sets (union) for set-membership witnesses; every nonzero
        /// row must evaluate into one of them.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        targets: Vec<FsTarget>,
        nodes: u64,
    },
    Refutation {
        r: usize,
        /// Avoiding coloring of the searched domain.
        avoiding: Coloring,
        nodes: u64,
    },
    Bound {
        r: usize,
        n: usize,
        /// Avoiding coloring of `1..=n-1` (absent when `n == 1`).
        below: Option<Coloring>,
        nodes: u64,
    },
}

/// Self-contained search result; [`super::verify_certificate`] re-checks it
/// without any search state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub matrix: SparseMatrix,
    pub coloring: Option<Coloring>,
    pub truncation: Option<usize>,
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Rational>,
    pub exhausted: bool,
    pub engine: EngineInfo,
    /// Set when membership in a central set is replaced by membership in a
    /// finite-sums set.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub surrogate: bool,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Witness vector and image, if this is a witness.
    pub fn witness(&self) -> Option<(&[Rational], &[Rational])> {
        match &self.payload {
            Payload::Witness { x, image, .. } => Some((x, image)),
            _ => None,
        }
    }
}
