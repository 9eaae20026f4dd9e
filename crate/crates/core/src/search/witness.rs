use super::certificate::{Certificate, CertificateKind, EngineInfo, Payload};
use super::parallel::{first_in_order, Ctl};
use super::{Outcome, SearchBounds, SearchError, SearchOptions};
use crate::coloring::Coloring;
use crate::matrix::SparseMatrix;
use crate::numeric::Rational;

enum RowCheck {
    Pass,
    Fail,
    /// Value left the coloring domain (only reported in strict mode).
    Outside { row: usize, value: Rational },
}

struct WitnessSearch<'a> {
    m: &'a SparseMatrix,
    c: &'a Coloring,
    grids: Vec<Vec<Rational>>,
    epsilon: Option<&'a Rational>,
    strict: bool,
    /// Rows indexed by the column at which they become fully determined.
    rows_at: Vec<Vec<usize>>,
}

type Hit = Result<(Vec<Rational>, usize), (usize, Rational)>;

impl WitnessSearch<'_> {
    fn check(&self, depth: usize, x: &[Rational], color: &mut Option<usize>) -> RowCheck {
        for &i in &self.rows_at[depth] {
            let v = self.m.row(i).dot(x);
            if !v.is_positive() {
                return RowCheck::Fail;
            }
            if matches!(self.epsilon, Some(e) if v >= *e) {
                return RowCheck::Fail;
            }
            let Some(col) = self.c.color_in_domain(&v) else {
                return if self.strict {
                    RowCheck::Outside { row: i, value: v }
                } else {
                    RowCheck::Fail
                };
            };
            match color {
                Some(prev) if *prev != col => return RowCheck::Fail,
                Some(_) => {}
                None => *color = Some(col),
            }
        }
        RowCheck::Pass
    }

    /// Tries `value` at `depth` and everything below it in lexicographic order.
    fn visit(
        &self,
        depth: usize,
        value: &Rational,
        x: &mut Vec<Rational>,
        color: Option<usize>,
        ctl: &mut Ctl<'_>,
    ) -> Option<Hit> {
        if !ctl.tick() {
            return None;
        }
        x[depth] = value.clone();
        let mut color = color;
        match self.check(depth, x, &mut color) {
            RowCheck::Fail => return None,
            RowCheck::Outside { row, value } => return Some(Err((row, value))),
            RowCheck::Pass => {}
        }
        if depth + 1 == x.len() {
            return Some(Ok((x.clone(), color.expect("matrix has rows"))));
        }
        for v in &self.grids[depth + 1] {
            if let Some(hit) = self.visit(depth + 1, v, x, color, ctl) {
                return Some(hit);
            }
            if ctl.over_budget() || ctl.superseded() {
                return None;
            }
        }
        None
    }
}

/// Lexicographically least `x` over the grids whose image `M x` is
/// monochromatic under `c` (and inside `(0, ε)` when `ε` is set).
///
/// Vectors whose image leaves the coloring domain are skipped unless
/// `bounds.strict_domain` is set.
pub fn find_witness(
    m: &SparseMatrix,
    c: &Coloring,
    bounds: &SearchBounds,
    opts: &SearchOptions,
) -> Result<Outcome<Certificate>, SearchError> {
    bounds.validate(m.ncols())?;
    if m.ncols() == 0 || m.nrows() == 0 {
        return Err(SearchError::InvalidInput("matrix must have rows and columns".into()));
    }
    let grids: Vec<Vec<Rational>> = bounds
        .grids
        .iter()
        .map(|g| {
            let mut g = g.clone();
            g.sort();
            g.dedup();
            g
        })
        .collect();
    let mut rows_at = vec![Vec::new(); m.ncols()];
    for (i, row) in m.rows().iter().enumerate() {
        rows_at[row.last_column().unwrap_or(0)].push(i);
    }
    let search = WitnessSearch {
        m,
        c,
        grids,
        epsilon: bounds.epsilon.as_ref(),
        strict: bounds.strict_domain,
        rows_at,
    };
    let (hit, nodes) = first_in_order(&search.grids[0], opts.workers, bounds.budget, 0, |v, ctl| {
        let mut x = vec![Rational::zero(); m.ncols()];
        search.visit(0, v, &mut x, None, ctl)
    })?;
    match hit {
        None => Ok(Outcome::Exhausted { nodes }),
        Some(Err((row, value))) => Err(SearchError::ImageOutsideDomain {
            row,
            value: value.to_string(),
        }),
        Some(Ok((x, color))) => {
            let image = m.apply(&x)?;
            Ok(Outcome::Found(Certificate {
                kind: CertificateKind::Witness,
                matrix: m.clone(),
                coloring: Some(c.clone()),
                truncation: m.truncation(),
                payload: Payload::Witness {
                    x,
                    image,
                    color: Some(color),
                    targets: Vec::new(),
                    nodes,
                },
                epsilon: bounds.epsilon.clone(),
                exhausted: false,
                engine: EngineInfo::new(opts.seed),
                surrogate: false,
            }))
        }
    }
}
