use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{MatrixError, SparseMatrix};
use crate::numeric::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockStatus {
    /// No row has a nonzero entry in the block.
    Empty,
    /// The nonzero rows form a first-entries matrix, hence an IPR one.
    FirstEntries { monic: bool },
    /// Nonzero rows exist but no structural IPR certificate applies.
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockReport {
    pub columns: [usize; 2],
    pub distinct_nonzero_rows: usize,
    pub status: BlockStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentedReport {
    pub valid: bool,
    pub blocks: Vec<BlockReport>,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub first_entries: bool,
    pub monic: bool,
    pub zero_rows: Vec<usize>,
    pub segmented: Option<SegmentedReport>,
}

/// First-entries test: every row is nonzero, its leading entry is positive,
/// and rows whose leading entries share a column share the leading value.
/// Returns `(first_entries, monic)`; zero rows are ignored so the test can
/// run on the nonzero part of a column block.
fn first_entries_flags(m: &SparseMatrix) -> (bool, bool) {
    let mut leading: BTreeMap<usize, &Rational> = BTreeMap::new();
    let mut first_entries = true;
    let mut monic = true;
    for row in m.rows() {
        let Some((col, value)) = row.leading() else {
            continue;
        };
        if !value.is_positive() {
            first_entries = false;
        }
        if *value != Rational::one() {
            monic = false;
        }
        match leading.get(col) {
            Some(prev) if *prev != value => first_entries = false,
            Some(_) => {}
            None => {
                leading.insert(*col, value);
            }
        }
    }
    (first_entries, first_entries && monic)
}

/// Structural classification. Segmented analysis runs when breakpoints are
/// passed or attached to the matrix; truncated matrices require them.
pub fn classify_matrix(
    m: &SparseMatrix,
    breakpoints: Option<&[usize]>,
) -> Result<StructureReport, MatrixError> {
    let breakpoints = breakpoints.or(m.breakpoints());
    if m.is_truncated() && breakpoints.is_none() {
        return Err(MatrixError::MissingBreakpoints);
    }
    let zero_rows = m.zero_rows();
    let (fe, monic) = first_entries_flags(m);
    let segmented = breakpoints
        .map(|bp| SegmentedSpec::new(m.clone(), bp.to_vec()).map(|s| s.report()))
        .transpose()?;
    Ok(StructureReport {
        first_entries: fe && zero_rows.is_empty(),
        monic: monic && zero_rows.is_empty(),
        zero_rows,
        segmented,
    })
}

/// A matrix together with column breakpoints `0 = α_0 < α_1 < ...` cutting
/// it into column blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SegmentedJson", into = "SegmentedJson")]
pub struct SegmentedSpec {
    matrix: SparseMatrix,
    breakpoints: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SegmentedJson {
    breakpoints: Vec<usize>,
    matrix: SparseMatrix,
}

impl TryFrom<SegmentedJson> for SegmentedSpec {
    type Error = MatrixError;
    fn try_from(j: SegmentedJson) -> Result<Self, Self::Error> {
        SegmentedSpec::new(j.matrix, j.breakpoints)
    }
}

impl From<SegmentedSpec> for SegmentedJson {
    fn from(s: SegmentedSpec) -> Self {
        SegmentedJson {
            breakpoints: s.breakpoints,
            matrix: s.matrix,
        }
    }
}

impl SegmentedSpec {
    /// Breakpoints must start at 0, increase strictly and reach past every
    /// column of the matrix.
    pub fn new(matrix: SparseMatrix, breakpoints: Vec<usize>) -> Result<Self, MatrixError> {
        if breakpoints.first() != Some(&0) {
            return Err(MatrixError::InvalidBreakpoints("must start at 0".into()));
        }
        if breakpoints.len() < 2 {
            return Err(MatrixError::InvalidBreakpoints("need at least one block".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MatrixError::InvalidBreakpoints("must be strictly increasing".into()));
        }
        let last = *breakpoints.last().expect("nonempty");
        if last < matrix.ncols() {
            return Err(MatrixError::InvalidBreakpoints(format!(
                "last breakpoint {last} leaves columns {last}..{} uncovered",
                matrix.ncols()
            )));
        }
        Ok(SegmentedSpec { matrix, breakpoints })
    }

    /// Stacks column blocks side by side; block `n` contributes
    /// `blocks[n].ncols()` columns and all blocks share the row count.
    pub fn from_blocks(blocks: &[SparseMatrix]) -> Result<Self, MatrixError> {
        let nrows = blocks.first().map(SparseMatrix::nrows).unwrap_or(0);
        let mut breakpoints = vec![0];
        let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); nrows];
        for block in blocks {
            if block.nrows() != nrows {
                return Err(MatrixError::DimensionMismatch {
                    expected: nrows,
                    got: block.nrows(),
                });
            }
            let offset = *breakpoints.last().expect("nonempty");
            for (i, row) in block.rows().iter().enumerate() {
                rows[i].extend(row.entries().iter().map(|(c, v)| (c + offset, v.clone())));
            }
            breakpoints.push(offset + block.ncols());
        }
        let ncols = *breakpoints.last().expect("nonempty");
        let matrix = SparseMatrix::new(ncols, rows)?
            .with_family("segmented")
            .with_breakpoints(Some(breakpoints.clone()));
        SegmentedSpec::new(matrix, breakpoints)
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn breakpoints(&self) -> &[usize] {
        &self.breakpoints
    }

    pub fn block_count(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Column range of block `n`.
    pub fn block_columns(&self, n: usize) -> (usize, usize) {
        (self.breakpoints[n], self.breakpoints[n + 1])
    }

    /// Block `n` with every row kept, so row indices match the full matrix.
    pub fn block(&self, n: usize) -> SparseMatrix {
        let (lo, hi) = self.block_columns(n);
        self.matrix.column_block(lo, hi)
    }

    /// `B_n = (M_0 ... M_n)`: all columns before the end of block `n`.
    pub fn prefix(&self, n: usize) -> SparseMatrix {
        let hi = self.breakpoints[n + 1];
        self.matrix
            .column_block(0, hi)
            .with_breakpoints(Some(self.breakpoints[..=n + 1].to_vec()))
            .with_family(format!("B_{n}"))
    }

    pub fn report(&self) -> SegmentedReport {
        let mut violations = Vec::new();
        for i in self.matrix.zero_rows() {
            violations.push(format!("row {i} is the zero row"));
        }
        let blocks: Vec<BlockReport> = (0..self.block_count())
            .map(|n| {
                let (lo, hi) = self.block_columns(n);
                let block = self.matrix.column_block(lo, hi);
                let mut distinct: Vec<_> = block.rows().iter().filter(|r| !r.is_zero()).collect();
                distinct.sort_by(|a, b| a.entries().cmp(b.entries()));
                distinct.dedup();
                let status = if distinct.is_empty() {
                    BlockStatus::Empty
                } else {
                    match first_entries_flags(&block) {
                        (true, monic) => BlockStatus::FirstEntries { monic },
                        (false, _) => BlockStatus::Unverified,
                    }
                };
                if status == BlockStatus::Unverified {
                    violations.push(format!(
                        "block {n} (columns {lo}..{hi}) is not a first-entries matrix"
                    ));
                }
                BlockReport {
                    columns: [lo, hi],
                    distinct_nonzero_rows: distinct.len(),
                    status,
                }
            })
            .collect();
        SegmentedReport {
            valid: violations.is_empty(),
            blocks,
            violations,
        }
    }
}
