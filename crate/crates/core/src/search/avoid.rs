use serde::{Deserialize, Serialize};

use super::certificate::{Certificate, CertificateKind, EngineInfo, Payload};
use super::parallel::{first_in_order, Ctl};
use super::{Outcome, SearchError, SearchOptions};
use crate::coloring::{Coloring, Domain};
use crate::matrix::SparseMatrix;
use crate::numeric::Rational;

/// Points colored before branching out to workers.
const PREFIX_POINTS: usize = 4;

/// Distinct image index sets `{M x}` over `x in domain^v` with every image
/// entry inside the domain, reduced to inclusion-minimal sets.
fn image_sets(m: &SparseMatrix, domain: &Domain, budget: u64) -> Result<(Vec<Vec<usize>>, u64), SearchError> {
    let v = m.ncols();
    let pts = domain.points();
    let mut rows_at = vec![Vec::new(); v.max(1)];
    for (i, row) in m.rows().iter().enumerate() {
        rows_at[row.last_column().unwrap_or(0)].push(i);
    }
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut x = vec![Rational::zero(); v];
    let mut idx = Vec::with_capacity(m.nrows());
    let mut nodes = 0u64;

    #[allow(clippy::too_many_arguments)]
    fn rec(
        depth: usize,
        m: &SparseMatrix,
        domain: &Domain,
        pts: &[Rational],
        rows_at: &[Vec<usize>],
        x: &mut Vec<Rational>,
        idx: &mut Vec<usize>,
        sets: &mut Vec<Vec<usize>>,
        nodes: &mut u64,
        budget: u64,
    ) -> bool {
        if depth == x.len() {
            let mut s = idx.clone();
            s.sort_unstable();
            s.dedup();
            sets.push(s);
            return true;
        }
        for p in pts {
            *nodes += 1;
            if *nodes > budget {
                return false;
            }
            x[depth] = p.clone();
            let mark = idx.len();
            let ok = rows_at[depth].iter().all(|&i| match domain.index_of(&m.row(i).dot(x)) {
                Some(j) => {
                    idx.push(j);
                    true
                }
                None => false,
            });
            if ok && !rec(depth + 1, m, domain, pts, rows_at, x, idx, sets, nodes, budget) {
                return false;
            }
            idx.truncate(mark);
        }
        true
    }

    if v == 0 || pts.is_empty() {
        return Ok((Vec::new(), 0));
    }
    if !rec(0, m, domain, pts, &rows_at, &mut x, &mut idx, &mut sets, &mut nodes, budget) {
        return Err(SearchError::BudgetExhausted { budget, nodes });
    }
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    let mut minimal: Vec<Vec<usize>> = Vec::new();
    for s in sets {
        let redundant = minimal.iter().any(|t| t.iter().all(|e| s.binary_search(e).is_ok()));
        if !redundant {
            minimal.push(s);
        }
    }
    Ok((minimal, nodes))
}

struct ColoringSearch {
    r: usize,
    /// For each point, the other members of every image set whose largest
    /// member it is.
    closing: Vec<Vec<Vec<usize>>>,
}

impl ColoringSearch {
    fn conflicts(&self, p: usize, c: u8, colors: &[u8]) -> bool {
        self.closing[p]
            .iter()
            .any(|others| others.iter().all(|&q| colors[q] == c))
    }

    /// Colors allowed at the next point: existing colors plus one new one.
    fn palette(&self, max_used: Option<u8>) -> u8 {
        let next = max_used.map_or(1, |m| m as usize + 2);
        next.min(self.r) as u8
    }

    fn extend(&self, p: usize, max_used: Option<u8>, colors: &mut Vec<u8>, ctl: &mut Ctl<'_>) -> bool {
        if p == self.closing.len() {
            return true;
        }
        for c in 0..self.palette(max_used) {
            if !ctl.tick() {
                return false;
            }
            if self.conflicts(p, c, colors) {
                continue;
            }
            colors.push(c);
            if self.extend(p + 1, Some(max_used.map_or(c, |m| m.max(c))), colors, ctl) {
                return true;
            }
            colors.pop();
            if ctl.over_budget() || ctl.superseded() {
                return false;
            }
        }
        false
    }

    /// Consistent colorings of the first `len` points in lexicographic
    /// order; returns them with the number of assignments tried.
    fn prefixes(&self, len: usize) -> (Vec<Vec<u8>>, u64) {
        let mut out = Vec::new();
        let mut tried = 0u64;
        let mut stack: Vec<(Vec<u8>, Option<u8>)> = vec![(Vec::new(), None)];
        while let Some((colors, max_used)) = stack.pop() {
            if colors.len() == len {
                out.push(colors);
                continue;
            }
            let p = colors.len();
            // push in reverse so the stack pops in lexicographic order
            for c in (0..self.palette(max_used)).rev() {
                tried += 1;
                if !self.conflicts(p, c, &colors) {
                    let mut next = colors.clone();
                    next.push(c);
                    stack.push((next, Some(max_used.map_or(c, |m| m.max(c)))));
                }
            }
        }
        (out, tried)
    }
}

/// Searches for an `r`-coloring of `domain` under which no vector of
/// `domain^v` has a monochromatic image inside the domain.
///
/// Colorings are explored with colors in increasing order and a new color
/// only introduced as the next unused index, so the first point always gets
/// color 0 and the result is the lexicographically least avoiding coloring
/// in that normal form.
pub fn find_avoiding_coloring(
    m: &SparseMatrix,
    r: usize,
    domain: &Domain,
    opts: &SearchOptions,
) -> Result<Outcome<Certificate>, SearchError> {
    if r == 0 || r > u8::MAX as usize {
        return Err(SearchError::InvalidInput(format!("palette size {r} out of range")));
    }
    let (sets, pre_nodes) = image_sets(m, domain, opts.budget)?;
    let n = domain.len();
    let mut closing = vec![Vec::new(); n];
    for s in sets {
        let (&last, others) = s.split_last().expect("image sets are nonempty");
        closing[last].push(others.to_vec());
    }
    let search = ColoringSearch { r, closing };
    let (prefixes, prefix_nodes) = search.prefixes(PREFIX_POINTS.min(n));
    let base = pre_nodes + prefix_nodes;
    let (found, nodes) = first_in_order(&prefixes, opts.workers, opts.budget, base, |prefix, ctl| {
        let mut colors = prefix.clone();
        let max_used = prefix.iter().copied().max();
        search
            .extend(prefix.len(), max_used, &mut colors, ctl)
            .then_some(colors)
    })?;
    Ok(match found {
        None => Outcome::Exhausted { nodes },
        Some(colors) => {
            let colors: Vec<usize> = colors.into_iter().map(usize::from).collect();
            let avoiding = Coloring::table_from_colors(domain.clone(), r, &colors);
            Outcome::Found(Certificate {
                kind: CertificateKind::Refutation,
                matrix: m.clone(),
                coloring: None,
                truncation: m.truncation(),
                payload: Payload::Refutation { r, avoiding, nodes },
                epsilon: None,
                exhausted: false,
                engine: EngineInfo::new(opts.seed),
                surrogate: false,
            })
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundOutcome {
    Resolved(Certificate),
    /// Every `N <= max_n` still admits an avoiding coloring.
    Unresolved {
        max_n: usize,
        last_avoiding: Option<Certificate>,
    },
}

impl BoundOutcome {
    /// The bound `N`, when resolved.
    pub fn bound(&self) -> Option<usize> {
        match self {
            BoundOutcome::Resolved(Certificate {
                payload: Payload::Bound { n, .. },
                ..
            }) => Some(*n),
            _ => None,
        }
    }
}

/// Least `N <= max_n` such that every `r`-coloring of `1..=N` admits a
/// monochromatic image of `m` over `1..=N`.
pub fn compactness_bound(
    m: &SparseMatrix,
    r: usize,
    max_n: usize,
    opts: &SearchOptions,
) -> Result<BoundOutcome, SearchError> {
    let mut previous: Option<Certificate> = None;
    for n in 1..=max_n {
        let domain = Domain::integers(1, n as i64)?;
        match find_avoiding_coloring(m, r, &domain, opts)? {
            Outcome::Found(cert) => previous = Some(cert),
            Outcome::Exhausted { nodes } => {
                let below = previous.map(|c| match c.payload {
                    Payload::Refutation { avoiding, .. } => avoiding,
                    _ => unreachable!("avoiding search returns refutations"),
                });
                return Ok(BoundOutcome::Resolved(Certificate {
                    kind: CertificateKind::Bound,
                    matrix: m.clone(),
                    coloring: None,
                    truncation: m.truncation(),
                    payload: Payload::Bound { r, n, below, nodes },
                    epsilon: None,
                    exhausted: true,
                    engine: EngineInfo::new(opts.seed),
                    surrogate: false,
                }));
            }
        }
    }
    Ok(BoundOutcome::Unresolved {
        max_n,
        last_avoiding: previous,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendReport {
    /// Compactness bound of the original matrix.
    pub base_bound: usize,
    /// First candidate whose extended matrix still resolves within scale.
    pub chosen: Option<Rational>,
    /// Each candidate tried, with the bound of the extended matrix if any.
    pub trials: Vec<(Rational, Option<usize>)>,
}

/// Tries the rows `b * rvec` on top of `m` for each candidate `b` in order
/// and keeps the first one for which the compactness bound still resolves
/// within `max_n`. A `None` answer is specific to this scale.
pub fn extend_with_row(
    m: &SparseMatrix,
    rvec: &[Rational],
    candidates: &[Rational],
    r: usize,
    max_n: usize,
    opts: &SearchOptions,
) -> Result<ExtendReport, SearchError> {
    if rvec.iter().all(Rational::is_zero) {
        return Err(SearchError::InvalidInput("row vector must be nonzero".into()));
    }
    if candidates.iter().any(Rational::is_zero) {
        return Err(SearchError::InvalidInput("candidates must be nonzero".into()));
    }
    let base_bound = compactness_bound(m, r, max_n, opts)?
        .bound()
        .ok_or_else(|| SearchError::InvalidInput(format!("matrix has no compactness bound <= {max_n}")))?;
    let mut trials = Vec::new();
    let mut chosen = None;
    for b in candidates {
        let row: Vec<Rational> = rvec.iter().map(|v| v * b).collect();
        let extended = m.stack_row_on_top(&row)?;
        let bound = compactness_bound(&extended, r, max_n, opts)?.bound();
        trials.push((b.clone(), bound));
        if bound.is_some() {
            chosen = Some(b.clone());
            break;
        }
    }
    Ok(ExtendReport {
        base_bound,
        chosen,
        trials,
    })
}
