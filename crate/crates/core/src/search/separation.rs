use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::parallel::{first_in_order, Ctl};
use super::{SearchError, SearchOptions};
use crate::matrix::{mt_rows, CompressedTuple};
use crate::numeric::{phi_of_mantissa, Rational};

/// Widest exponent window accepted (the color table has `2^(width+1)` slots).
const MAX_WINDOW: i64 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthStatus {
    /// Both sequence searches finished (reached `maxlen` or exhausted).
    Complete,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorDepth {
    pub color: usize,
    /// `None` when a search ran out of budget.
    pub depth: Option<usize>,
    /// Longest prefix length reached for each tuple on its own.
    pub reach_a: Option<usize>,
    pub reach_b: Option<usize>,
    /// Lexicographically least sequences of length `depth`.
    pub x_witness: Option<Vec<Rational>>,
    pub y_witness: Option<Vec<Rational>>,
    pub status: DepthStatus,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub window: [i64; 2],
    pub maxlen: usize,
    pub tuple_a: CompressedTuple,
    pub tuple_b: CompressedTuple,
    pub colors: Vec<ColorDepth>,
}

enum Step {
    Ok,
    Bad,
    /// Some pattern reaches 2; every larger term does too.
    TooLarge,
}

/// Block patterns whose last block contains the newest term, as
/// coefficients over the earlier terms plus the newest term's coefficient.
struct Pattern {
    earlier: Vec<(usize, u64)>,
    last: u64,
}

struct SequenceSearch<'a> {
    grid: &'a [u64],
    colors: &'a [u8],
    target: u8,
    limit: u64,
    maxlen: usize,
    closing: Vec<Vec<Pattern>>,
}

struct Reached {
    /// `first[d]`: lexicographically first valid prefix of length `d`.
    first: Vec<Option<Vec<u64>>>,
}

impl SequenceSearch<'_> {
    fn step(&self, x: &[u64], m: u64) -> Step {
        let mut bad = false;
        for p in &self.closing[x.len()] {
            let v = p.earlier.iter().map(|&(i, c)| c * x[i]).sum::<u64>() + p.last * m;
            if v >= self.limit {
                return Step::TooLarge;
            }
            bad |= self.colors[v as usize] != self.target;
        }
        if bad {
            Step::Bad
        } else {
            Step::Ok
        }
    }

    /// Extends the valid prefix `x`; true once a sequence of `maxlen` terms
    /// is found.
    fn extend(&self, x: &mut Vec<u64>, reached: &mut Reached, ctl: &mut Ctl<'_>) -> bool {
        let d = x.len();
        if reached.first[d].is_none() {
            reached.first[d] = Some(x.clone());
        }
        if d == self.maxlen {
            return true;
        }
        for &m in self.grid {
            if !ctl.tick() {
                return false;
            }
            match self.step(x, m) {
                Step::TooLarge => break,
                Step::Bad => continue,
                Step::Ok => {}
            }
            x.push(m);
            if self.extend(x, reached, ctl) {
                return true;
            }
            x.pop();
            if ctl.over_budget() || ctl.superseded() {
                return false;
            }
        }
        false
    }
}

fn patterns(tuple: &CompressedTuple, coef: &[u64], maxlen: usize) -> Vec<Vec<Pattern>> {
    (0..maxlen)
        .map(|d| {
            mt_rows(tuple, d + 1)
                .into_iter()
                .filter(|labels| labels[d] != 0)
                .map(|labels| Pattern {
                    earlier: labels[..d]
                        .iter()
                        .enumerate()
                        .filter(|(_, &l)| l != 0)
                        .map(|(i, &l)| (i, coef[l - 1]))
                        .collect(),
                    last: coef[labels[d] - 1],
                })
                .collect()
        })
        .collect()
}

fn integer_coefficients(tuple: &CompressedTuple) -> Result<Vec<u64>, SearchError> {
    tuple
        .entries()
        .iter()
        .map(|a| match a.to_i64() {
            Some(v) if a.is_integer() && v > 0 => Ok(v as u64),
            _ => Err(SearchError::InvalidInput(format!(
                "tuple entries must be positive integers, got {a}"
            ))),
        })
        .collect()
}

/// Lexicographically first sequence of each length (if any) and the node count.
type Prefixes = (Vec<Option<Vec<u64>>>, u64);

/// First-found prefixes per length, merged over branches in order.
fn longest_sequences(
    search: &SequenceSearch<'_>,
    opts: &SearchOptions,
) -> Result<Prefixes, SearchError> {
    let branches: Vec<usize> = (0..search.grid.len()).collect();
    let slots: Vec<Mutex<Option<Reached>>> = branches.iter().map(|_| Mutex::new(None)).collect();
    let (hit, nodes) = first_in_order(&branches, opts.workers, opts.budget, 0, |&b, ctl| {
        let mut reached = Reached {
            first: vec![None; search.maxlen + 1],
        };
        let m = search.grid[b];
        let mut done = false;
        if ctl.tick() && matches!(search.step(&[], m), Step::Ok) {
            let mut x = vec![m];
            done = search.extend(&mut x, &mut reached, ctl);
        }
        *slots[b].lock().unwrap() = Some(reached);
        done.then_some(b)
    })?;
    let last = hit.unwrap_or(branches.len().saturating_sub(1));
    let mut first = vec![None; search.maxlen + 1];
    first[0] = Some(Vec::new());
    for slot in slots.into_iter().take(last + 1) {
        let Some(reached) = slot.into_inner().unwrap() else {
            continue;
        };
        for (d, p) in reached.first.into_iter().enumerate() {
            if first[d].is_none() {
                first[d] = p;
            }
        }
    }
    Ok((first, nodes))
}

/// For each class of the three-coloring `φ mod 3` of the dyadics in
/// `(0, 2)`, the largest `L <= maxlen` such that there are sequences `x`, `y`
/// of `L` terms with supports in `[low, high]` whose Milliken–Taylor sets
/// for `tuple_a` and `tuple_b` both lie in that class.
///
/// Lengths below the longer tuple are reported as depth 0.
pub fn separation_depth_search(
    window: (i64, i64),
    maxlen: usize,
    tuple_a: &CompressedTuple,
    tuple_b: &CompressedTuple,
    opts: &SearchOptions,
) -> Result<SeparationReport, SearchError> {
    let (low, high) = window;
    if low > high || high > 0 || high - low > MAX_WINDOW {
        return Err(SearchError::InvalidInput(format!(
            "window [{low}, {high}] must satisfy low <= high <= 0 and span at most {} exponents",
            MAX_WINDOW + 1
        )));
    }
    if maxlen == 0 {
        return Err(SearchError::InvalidInput("maxlen must be at least 1".into()));
    }
    let coef_a = integer_coefficients(tuple_a)?;
    let coef_b = integer_coefficients(tuple_b)?;
    // values are held as multiples of 2^low; 2 is 2^(1 - low) units
    let limit = 1u64 << (1 - low);
    let colors: Vec<u8> = (0..limit).map(|v| (phi_of_mantissa(v) % 3) as u8).collect();
    let step = 1u64 << (high - low + 1);
    let grid: Vec<u64> = (1..step).collect();
    let closing_a = || patterns(tuple_a, &coef_a, maxlen);
    let closing_b = || patterns(tuple_b, &coef_b, maxlen);
    let need = tuple_a.len().max(tuple_b.len());
    let to_rational = |p: &[u64]| -> Vec<Rational> {
        p.iter()
            .map(|&v| Rational::from_integer(v as i64) * Rational::pow2(low))
            .collect()
    };

    let mut out = Vec::new();
    for color in 0..3u8 {
        let run = |closing| {
            let search = SequenceSearch {
                grid: &grid,
                colors: &colors,
                target: color,
                limit,
                maxlen,
                closing,
            };
            longest_sequences(&search, opts)
        };
        let a = run(closing_a());
        let b = run(closing_b());
        let entry = match (a, b) {
            (Ok((fa, na)), Ok((fb, nb))) => {
                let reach = |f: &[Option<Vec<u64>>]| f.iter().rposition(Option::is_some).unwrap_or(0);
                let (ra, rb) = (reach(&fa), reach(&fb));
                let depth = if ra.min(rb) >= need { ra.min(rb) } else { 0 };
                let wit = |f: &[Option<Vec<u64>>]| (depth > 0).then(|| to_rational(f[depth].as_ref().unwrap()));
                ColorDepth {
                    color: color as usize,
                    depth: Some(depth),
                    reach_a: Some(ra),
                    reach_b: Some(rb),
                    x_witness: wit(&fa),
                    y_witness: wit(&fb),
                    status: DepthStatus::Complete,
                    nodes: na + nb,
                }
            }
            (a, b) => {
                let nodes_of = |r: &Result<Prefixes, SearchError>| match r {
                    Ok((_, n)) => Ok(*n),
                    Err(SearchError::BudgetExhausted { nodes, .. }) => Ok(*nodes),
                    Err(e) => Err(e.clone()),
                };
                ColorDepth {
                    color: color as usize,
                    depth: None,
                    reach_a: None,
                    reach_b: None,
                    x_witness: None,
                    y_witness: None,
                    status: DepthStatus::BudgetExhausted,
                    nodes: nodes_of(&a)? + nodes_of(&b)?,
                }
            }
        };
        out.push(entry);
    }
    Ok(SeparationReport {
        window: [low, high],
        maxlen,
        tuple_a: tuple_a.clone(),
        tuple_b: tuple_b.clone(),
        colors: out,
    })
}
