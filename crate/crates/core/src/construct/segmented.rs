use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{ConstructError, IpTailOracle};
use crate::matrix::{diagonal_sum, SegmentedSpec, SparseMatrix};
use crate::numeric::Rational;
use crate::search::{Certificate, CertificateKind, EngineInfo, Payload};

/// Generators considered per block variable, counted from the current tail.
const WINDOW: usize = 12;
/// Node cap for a single block search.
const BLOCK_BUDGET: u64 = 5_000_000;

/// Values chosen for one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSolution {
    pub block: usize,
    pub x: Vec<Rational>,
    /// Oracle tail when the block was solved.
    pub tail: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentedSolution {
    pub certificate: Certificate,
    pub blocks: Vec<BlockSolution>,
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
}

enum BlockOutcome {
    Solved { x: Vec<Rational>, used: Vec<usize> },
    Unsolvable,
    OutOfBudget,
}

struct BlockSearch<'a> {
    oracle: &'a IpTailOracle,
    /// For each block column, the block parts (coefficients by block column)
    /// of the rows whose last block entry sits there.
    rows_at: Vec<Vec<Vec<(usize, Rational)>>>,
    candidates: Vec<Rational>,
    nodes: u64,
}

impl BlockSearch<'_> {
    fn visit(&mut self, x: &mut Vec<Rational>, used: &mut Vec<Vec<usize>>) -> Option<bool> {
        let d = x.len();
        if d == self.rows_at.len() {
            return Some(true);
        }
        for ci in 0..self.candidates.len() {
            self.nodes += 1;
            if self.nodes > BLOCK_BUDGET {
                return None;
            }
            x.push(self.candidates[ci].clone());
            let mark = used.len();
            let ok = self.rows_at[d].iter().all(|row| {
                let v: Rational = row.iter().map(|(c, a)| a * &x[*c]).sum();
                match self.oracle.decompose(&v) {
                    Some(idx) => {
                        used.push(idx);
                        true
                    }
                    None => false,
                }
            });
            if ok {
                match self.visit(x, used) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
            }
            used.truncate(mark);
            x.pop();
        }
        Some(false)
    }
}

/// Chooses values for columns `lo..hi` of `m` so that every row with a
/// nonzero entry there has its block part inside the oracle's tail set.
/// Candidates are the finite sums over the next generators in colex order
/// (sums of earlier generators first), which leaves later tails as long as
/// possible.
fn solve_block(m: &SparseMatrix, lo: usize, hi: usize, oracle: &IpTailOracle) -> BlockOutcome {
    let mut rows_at = vec![Vec::new(); hi - lo];
    for row in m.rows() {
        let part: Vec<(usize, Rational)> = row
            .entries()
            .iter()
            .filter(|(c, _)| (lo..hi).contains(c))
            .map(|(c, a)| (c - lo, a.clone()))
            .collect();
        if let Some(&(last, _)) = part.last() {
            rows_at[last].push(part);
        }
    }
    let w = oracle.remaining().min(WINDOW);
    let gens = &oracle.generators()[oracle.tail()..oracle.tail() + w];
    let candidates: Vec<Rational> = (1u32..1 << w)
        .map(|mask| {
            (0..w)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| gens[i].clone())
                .sum()
        })
        .collect();
    let mut search = BlockSearch {
        oracle,
        rows_at,
        candidates,
        nodes: 0,
    };
    let mut x = Vec::new();
    let mut used = Vec::new();
    match search.visit(&mut x, &mut used) {
        Some(true) => {
            let used: BTreeSet<usize> = used.into_iter().flatten().collect();
            BlockOutcome::Solved {
                x,
                used: used.into_iter().collect(),
            }
        }
        Some(false) => BlockOutcome::Unsolvable,
        None => BlockOutcome::OutOfBudget,
    }
}

fn block_is_empty(m: &SparseMatrix, lo: usize, hi: usize) -> bool {
    m.rows()
        .iter()
        .all(|r| r.entries().iter().all(|(c, _)| !(lo..hi).contains(c)))
}

/// Solves blocks `0..=depth` of `spec` in order. Each block is solved inside
/// the current oracle tail, and the tail then moves past every generator its
/// rows used, so every nonzero row of every prefix `B_n` evaluates to a
/// finite sum of distinct generators from the original set.
pub fn segmented_solve(
    spec: &SegmentedSpec,
    oracle: &IpTailOracle,
    depth: usize,
    seed: u64,
) -> Result<SegmentedSolution, ConstructError> {
    let blocks = spec.block_count();
    if depth >= blocks {
        return Err(ConstructError::DepthBeyondSpec { depth, blocks });
    }
    let m = spec.matrix();
    let fill = oracle.generators().last().expect("oracle is nonempty").clone();
    let mut current = oracle.clone();
    let mut x = Vec::new();
    let mut solved = Vec::new();
    for n in 0..=depth {
        let (lo, hi) = spec.block_columns(n);
        let hi = hi.min(m.ncols());
        let tail = current.tail();
        let xs = if block_is_empty(m, lo, hi) {
            vec![fill.clone(); hi - lo]
        } else {
            if current.remaining() == 0 {
                return Err(ConstructError::OracleExhausted { block: n });
            }
            match solve_block(m, lo, hi, &current) {
                BlockOutcome::Solved { x, used } => {
                    current = current.tail_after(&used)?;
                    x
                }
                BlockOutcome::Unsolvable | BlockOutcome::OutOfBudget if current.remaining() < hi - lo => {
                    return Err(ConstructError::OracleExhausted { block: n })
                }
                _ => return Err(ConstructError::BlockUnsolvable { block: n }),
            }
        };
        x.extend(xs.iter().cloned());
        solved.push(BlockSolution { block: n, x: xs, tail });
    }
    let prefix = spec.prefix(depth);
    let y = prefix.apply(&x)?;
    let certificate = Certificate {
        kind: CertificateKind::Witness,
        matrix: prefix.clone(),
        coloring: None,
        truncation: prefix.truncation(),
        payload: Payload::Witness {
            x: x.clone(),
            image: y.clone(),
            color: None,
            targets: vec![oracle.target()],
            nodes: 0,
        },
        epsilon: None,
        exhausted: false,
        engine: EngineInfo::new(seed),
        surrogate: true,
    };
    Ok(SegmentedSolution {
        certificate,
        blocks: solved,
        x,
        y,
    })
}

/// Solves block `n` into target `n` for `n < prefix` and stacks the
/// witnesses along the block diagonal. Targets must be pairwise disjoint;
/// this is checked on their full member sets.
pub fn countable_diagonal_solve(
    blocks: &[SparseMatrix],
    targets: &[IpTailOracle],
    prefix: usize,
    seed: u64,
) -> Result<SegmentedSolution, ConstructError> {
    let available = blocks.len().min(targets.len());
    if prefix == 0 || prefix > available {
        return Err(ConstructError::DepthBeyondSpec {
            depth: prefix,
            blocks: available,
        });
    }
    let members: Vec<BTreeSet<Rational>> = targets[..prefix]
        .iter()
        .enumerate()
        .map(|(n, t)| {
            t.members().map(|v| v.into_iter().collect()).ok_or_else(|| ConstructError::BlockFailure {
                block: n,
                report: "target has too many generators to enumerate".into(),
            })
        })
        .collect::<Result<_, _>>()?;
    for i in 0..prefix {
        for j in i + 1..prefix {
            if let Some(shared) = members[i].intersection(&members[j]).next() {
                return Err(ConstructError::DisjointnessViolation {
                    first: i,
                    second: j,
                    member: shared.to_string(),
                });
            }
        }
    }
    let mut x = Vec::new();
    let mut solved = Vec::new();
    let mut stacked: Option<SparseMatrix> = None;
    for n in 0..prefix {
        let b = &blocks[n];
        let t = &targets[n];
        let xs = match solve_block(b, 0, b.ncols(), t) {
            BlockOutcome::Solved { x, .. } => x,
            BlockOutcome::Unsolvable => {
                return Err(ConstructError::BlockFailure {
                    block: n,
                    report: format!("no solution over {} generators from tail {}", t.remaining(), t.tail()),
                })
            }
            BlockOutcome::OutOfBudget => {
                return Err(ConstructError::BlockFailure {
                    block: n,
                    report: format!("search exceeded {BLOCK_BUDGET} nodes"),
                })
            }
        };
        x.extend(xs.iter().cloned());
        solved.push(BlockSolution {
            block: n,
            x: xs,
            tail: t.tail(),
        });
        stacked = Some(match stacked {
            None => b.clone(),
            Some(s) => diagonal_sum(&s, b),
        });
    }
    let matrix = stacked.expect("prefix is positive");
    let y = matrix.apply(&x)?;
    let certificate = Certificate {
        kind: CertificateKind::Witness,
        matrix: matrix.clone(),
        coloring: None,
        truncation: matrix.truncation(),
        payload: Payload::Witness {
            x: x.clone(),
            image: y.clone(),
            color: None,
            targets: targets[..prefix].iter().map(IpTailOracle::target).collect(),
            nodes: 0,
        },
        epsilon: None,
        exhausted: false,
        engine: EngineInfo::new(seed),
        surrogate: true,
    };
    Ok(SegmentedSolution {
        certificate,
        blocks: solved,
        x,
        y,
    })
}
