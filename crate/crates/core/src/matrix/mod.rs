//! Sparse exact matrices, the standard matrix families and structural
//! classifiers.

mod classify;
mod families;

pub use classify::{classify_matrix, BlockReport, BlockStatus, SegmentedReport, SegmentedSpec, StructureReport};
pub use families::{build_family, build_family_with_cap, mt_rows, Family, DEFAULT_ROW_CAP};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("unknown matrix family {0:?}")]
    UnknownFamily(String),
    #[error("family would have {rows} rows, above the cap of {cap}")]
    SizeTooLarge { rows: u128, cap: usize },
    #[error("invalid family parameters: {0}")]
    InvalidParams(String),
    #[error("row has no nonzero entry")]
    AllZero,
    #[error("truncated matrix needs breakpoints for segmented classification")]
    MissingBreakpoints,
    #[error("invalid breakpoints: {0}")]
    InvalidBreakpoints(String),
    #[error("vector has length {got}, matrix has {expected} columns")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("row {row}: column {col} outside 0..{ncols}")]
    ColumnOutOfRange { row: usize, col: usize, ncols: usize },
    #[error("row {row}: column {col} listed twice")]
    DuplicateColumn { row: usize, col: usize },
}

/// One sparse row: `(column, value)` pairs sorted by column, values nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SparseRow {
    entries: Vec<(usize, Rational)>,
}

impl SparseRow {
    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Leading (first nonzero) entry.
    pub fn leading(&self) -> Option<&(usize, Rational)> {
        self.entries.first()
    }

    pub fn get(&self, col: usize) -> Rational {
        self.entries
            .binary_search_by_key(&col, |(c, _)| *c)
            .map(|i| self.entries[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    /// Largest column with a nonzero entry.
    pub fn last_column(&self) -> Option<usize> {
        self.entries.last().map(|(c, _)| *c)
    }

    pub fn dot(&self, x: &[Rational]) -> Rational {
        self.entries.iter().map(|(c, v)| v * &x[*c]).sum()
    }

    /// Dense form over `ncols` columns.
    pub fn to_dense(&self, ncols: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); ncols];
        for (c, v) in &self.entries {
            out[*c] = v.clone();
        }
        out
    }
}

/// A finite (or finitely truncated infinite) rational matrix stored by rows.
///
/// `truncation` is `Some(depth)` for prefixes of ω×ω matrices; the depth is
/// carried into every certificate built from the matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct SparseMatrix {
    rows: Vec<SparseRow>,
    ncols: usize,
    truncation: Option<usize>,
    family: Option<String>,
    breakpoints: Option<Vec<usize>>,
}

impl SparseMatrix {
    /// Builds a matrix from `(column, value)` rows. Zero values are dropped.
    pub fn new(ncols: usize, rows: Vec<Vec<(usize, Rational)>>) -> Result<Self, MatrixError> {
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, mut entries)| {
                entries.retain(|(_, v)| !v.is_zero());
                entries.sort_by_key(|(c, _)| *c);
                for w in entries.windows(2) {
                    if w[0].0 == w[1].0 {
                        return Err(MatrixError::DuplicateColumn { row: i, col: w[0].0 });
                    }
                }
                if let Some((c, _)) = entries.last() {
                    if *c >= ncols {
                        return Err(MatrixError::ColumnOutOfRange { row: i, col: *c, ncols });
                    }
                }
                Ok(SparseRow { entries })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SparseMatrix {
            rows,
            ncols,
            truncation: None,
            family: None,
            breakpoints: None,
        })
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Result<Self, MatrixError> {
        let ncols = rows.iter().map(Vec::len).max().unwrap_or(0);
        Self::new(
            ncols,
            rows.iter()
                .map(|r| r.iter().cloned().enumerate().collect())
                .collect(),
        )
    }

    /// Convenience constructor from small integer entries.
    pub fn from_integers(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect())
            .collect();
        Self::from_dense(&dense).expect("dense rows are well formed")
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| vec![(i, Rational::one())]).collect())
            .expect("identity is well formed")
    }

    pub fn with_family(mut self, family: impl Into<String>) -> Self {
        self.family = Some(family.into());
        self
    }

    pub fn with_truncation(mut self, depth: Option<usize>) -> Self {
        self.truncation = depth;
        self
    }

    pub fn with_breakpoints(mut self, breakpoints: Option<Vec<usize>>) -> Self {
        self.breakpoints = breakpoints;
        self
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.rows[i]
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    pub fn is_truncated(&self) -> bool {
        self.truncation.is_some()
    }

    pub fn family(&self) -> Option<&str> {
        self.family.as_deref()
    }

    pub fn breakpoints(&self) -> Option<&[usize]> {
        self.breakpoints.as_deref()
    }

    pub fn get(&self, row: usize, col: usize) -> Rational {
        self.rows[row].get(col)
    }

    /// `M x`, exactly.
    pub fn apply(&self, x: &[Rational]) -> Result<Vec<Rational>, MatrixError> {
        if x.len() != self.ncols {
            return Err(MatrixError::DimensionMismatch {
                expected: self.ncols,
                got: x.len(),
            });
        }
        Ok(self.rows.iter().map(|r| r.dot(x)).collect())
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|r| r.to_dense(self.ncols)).collect()
    }

    /// New matrix with `row` placed above the existing rows.
    pub fn stack_row_on_top(&self, row: &[Rational]) -> Result<Self, MatrixError> {
        if row.len() != self.ncols {
            return Err(MatrixError::DimensionMismatch {
                expected: self.ncols,
                got: row.len(),
            });
        }
        let mut rows = Vec::with_capacity(self.rows.len() + 1);
        rows.push(row.iter().cloned().enumerate().collect());
        rows.extend(self.rows.iter().map(|r| r.entries.clone()));
        Ok(SparseMatrix::new(self.ncols, rows)?
            .with_truncation(self.truncation)
            .with_family(format!("{}+row", self.family.as_deref().unwrap_or("matrix"))))
    }

    /// Columns `lo..hi` re-indexed from zero; every row is kept so row
    /// indices line up with the original.
    pub fn column_block(&self, lo: usize, hi: usize) -> SparseMatrix {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.entries
                    .iter()
                    .filter(|(c, _)| *c >= lo && *c < hi)
                    .map(|(c, v)| (c - lo, v.clone()))
                    .collect()
            })
            .collect();
        SparseMatrix::new(hi - lo, rows).expect("restriction keeps rows well formed")
    }

    /// Rows with no nonzero entry.
    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| self.rows[i].is_zero()).collect()
    }
}

/// Block diagonal sum `(M O; O N)`. Columns of `n` follow those of `m`.
pub fn diagonal_sum(m: &SparseMatrix, n: &SparseMatrix) -> SparseMatrix {
    let offset = m.ncols;
    let mut rows: Vec<Vec<(usize, Rational)>> = m.rows.iter().map(|r| r.entries.clone()).collect();
    rows.extend(n.rows.iter().map(|r| {
        r.entries
            .iter()
            .map(|(c, v)| (c + offset, v.clone()))
            .collect()
    }));
    let truncation = match (m.truncation, n.truncation) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let family = format!(
        "diag({},{})",
        m.family.as_deref().unwrap_or("matrix"),
        n.family.as_deref().unwrap_or("matrix")
    );
    SparseMatrix::new(offset + n.ncols, rows)
        .expect("block rows are well formed")
        .with_family(family)
        .with_truncation(truncation)
}

/// Nonempty tuple of nonzero rationals without adjacent repeats.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct CompressedTuple(Vec<Rational>);

impl CompressedTuple {
    /// Validates an already compressed tuple.
    pub fn new(entries: Vec<Rational>) -> Result<Self, MatrixError> {
        if entries.is_empty() {
            return Err(MatrixError::AllZero);
        }
        if entries.iter().any(Rational::is_zero) {
            return Err(MatrixError::InvalidParams("compressed tuple contains zero".into()));
        }
        if entries.windows(2).any(|w| w[0] == w[1]) {
            return Err(MatrixError::InvalidParams(
                "compressed tuple has equal adjacent entries".into(),
            ));
        }
        Ok(CompressedTuple(entries))
    }

    pub fn from_integers(entries: &[i64]) -> Result<Self, MatrixError> {
        Self::new(entries.iter().map(|&v| Rational::from_integer(v)).collect())
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl TryFrom<Vec<Rational>> for CompressedTuple {
    type Error = MatrixError;
    fn try_from(v: Vec<Rational>) -> Result<Self, Self::Error> {
        CompressedTuple::new(v)
    }
}

impl From<CompressedTuple> for Vec<Rational> {
    fn from(t: CompressedTuple) -> Self {
        t.0
    }
}

/// Deletes zeros, then collapses runs of equal adjacent entries.
pub fn compress(row: &[Rational]) -> Result<CompressedTuple, MatrixError> {
    let mut out: Vec<Rational> = Vec::new();
    for v in row.iter().filter(|v| !v.is_zero()) {
        if out.last() != Some(v) {
            out.push(v.clone());
        }
    }
    if out.is_empty() {
        return Err(MatrixError::AllZero);
    }
    Ok(CompressedTuple(out))
}

/// On-disk matrix form: `{shape, rows: [[[col, "p/q"], ...], ...], family,
/// truncation, breakpoints?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct MatrixJson {
    shape: [usize; 2],
    rows: Vec<Vec<(usize, Rational)>>,
    family: Option<String>,
    truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    breakpoints: Option<Vec<usize>>,
}

impl TryFrom<MatrixJson> for SparseMatrix {
    type Error = MatrixError;
    fn try_from(j: MatrixJson) -> Result<Self, Self::Error> {
        let [nrows, ncols] = j.shape;
        if j.rows.len() != nrows {
            return Err(MatrixError::DimensionMismatch {
                expected: nrows,
                got: j.rows.len(),
            });
        }
        let mut m = SparseMatrix::new(ncols, j.rows)?;
        m.family = j.family;
        m.truncation = j.truncation;
        m.breakpoints = j.breakpoints;
        Ok(m)
    }
}

impl From<SparseMatrix> for MatrixJson {
    fn from(m: SparseMatrix) -> Self {
        MatrixJson {
            shape: [m.rows.len(), m.ncols],
            rows: m.rows.into_iter().map(|r| r.entries).collect(),
            family: m.family,
            truncation: m.truncation,
            breakpoints: m.breakpoints,
        }
    }
}
