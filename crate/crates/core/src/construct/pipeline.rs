use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{product_coloring_on, Coloring, ColoringError, Domain};
use crate::matrix::{diagonal_sum, SparseMatrix};
use crate::numeric::Rational;
use crate::search::{
    compactness_bound, find_witness, Certificate, CertificateKind, EngineInfo, Outcome, Payload, SearchBounds,
    SearchError, SearchOptions,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("stage 1 (compactness bound): {0}")]
    Compactness(String),
    #[error("stage 2 (pick z): no grid point below epsilon/k = {0}")]
    NoZ(Rational),
    #[error("stage 3 (product coloring): {0}")]
    Product(ColoringError),
    #[error("stage 4 (N witness): {0}")]
    NWitness(String),
    #[error("stage 4 (induced coloring of 1..=k): {0}")]
    Induced(ColoringError),
    #[error("stage 5 (M witness): {0}")]
    MWitness(String),
    #[error("invalid input: {0}")]
    Input(String),
}

/// Source of vectors `y` for the infinite block `N`: every entry of `N y`
/// must have one color under `coloring` and lie in `(0, cap)`.
pub trait WitnessSource {
    fn matrix(&self) -> &SparseMatrix;

    fn solve(&self, coloring: &Coloring, cap: &Rational, opts: &SearchOptions) -> Result<Vec<Rational>, String>;
}

/// Exhaustive search on a truncation of `N`, with every column ranging over
/// the coloring's domain.
#[derive(Debug, Clone)]
pub struct TruncationSolver {
    pub n: SparseMatrix,
}

impl WitnessSource for TruncationSolver {
    fn matrix(&self) -> &SparseMatrix {
        &self.n
    }

    fn solve(&self, coloring: &Coloring, cap: &Rational, opts: &SearchOptions) -> Result<Vec<Rational>, String> {
        let grid = coloring.domain().points().to_vec();
        let bounds = SearchBounds::uniform(grid, self.n.ncols())
            .with_epsilon(Some(cap.clone()))
            .with_budget(opts.budget);
        match find_witness(&self.n, coloring, &bounds, opts) {
            Ok(Outcome::Found(cert)) => Ok(cert.witness().expect("witness certificate").0.to_vec()),
            Ok(Outcome::Exhausted { nodes }) => Err(format!("no witness on the truncation ({nodes} nodes)")),
            Err(e) => Err(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Largest `N` tried for the compactness bound of `M`.
    pub max_k: usize,
    pub search: SearchOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            max_k: 16,
            search: SearchOptions::default(),
        }
    }
}

/// Intermediate values of a pipeline run, kept for inspection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub k: usize,
    pub z: Rational,
    /// Number of classes of the product coloring actually realized.
    pub product_classes: usize,
    pub y: Vec<Rational>,
    pub a: Rational,
    /// `gamma[t - 1] = phi(t a)`.
    pub gamma: Vec<usize>,
    pub u: Vec<Rational>,
    pub i: Rational,
    pub j: usize,
}

/// Witness for `diag(M, N)` whose image is monochromatic under `phi` and
/// inside `(0, epsilon)`.
///
/// 1. `k`: compactness bound of `M` for `r` colors;
/// 2. `z`: largest domain point below `epsilon / k`;
/// 3. `psi(x)` records `phi(t x)` for `t = 1..=k`, on the domain points below `z`;
/// 4. `y` from the source with `N y` psi-monochromatic in `(0, z)`; `a` is the
///    first entry of `N y` and `gamma(t) = phi(t a)` colors `1..=k`;
/// 5. `u` over `1..=k` with `M u` gamma-monochromatic; `i` is its first entry;
/// 6. the witness is `(a u ; i y)` with color `j = gamma(i)`.
pub fn extension_pipeline(
    m: &SparseMatrix,
    n_solver: &dyn WitnessSource,
    phi: &Coloring,
    epsilon: &Rational,
    config: &PipelineConfig,
) -> Result<(Certificate, PipelineTrace), PipelineError> {
    if !epsilon.is_positive() {
        return Err(PipelineError::Input("epsilon must be positive".into()));
    }
    if m.nrows() == 0 || m.ncols() == 0 || m.is_truncated() {
        return Err(PipelineError::Input("M must be a finite nonempty matrix".into()));
    }
    let r = phi.r();
    let opts = &config.search;

    let k = compactness_bound(m, r, config.max_k, opts)
        .map_err(|e| PipelineError::Compactness(e.to_string()))?
        .bound()
        .ok_or_else(|| PipelineError::Compactness(format!("unresolved up to N = {}", config.max_k)))?;

    let cap = epsilon / &Rational::from_integer(k as i64);
    let z = phi
        .domain()
        .points()
        .iter()
        .rev()
        .find(|p| **p < cap)
        .cloned()
        .ok_or_else(|| PipelineError::NoZ(cap.clone()))?;

    let below = phi.domain().below(&z);
    if below.is_empty() {
        return Err(PipelineError::NoZ(z));
    }
    let psi = product_coloring_on(phi, k, below).map_err(PipelineError::Product)?;

    let y = n_solver
        .solve(&psi, &z, opts)
        .map_err(PipelineError::NWitness)?;
    let n = n_solver.matrix();
    let ny = n.apply(&y).map_err(|e| PipelineError::NWitness(e.to_string()))?;
    let a = ny
        .iter()
        .zip(n.rows())
        .find(|(_, row)| !row.is_zero())
        .map(|(v, _)| v.clone())
        .ok_or_else(|| PipelineError::NWitness("N has no nonzero row".into()))?;
    let gamma: Vec<usize> = (1..=k as i64)
        .map(|t| phi.color_of(&a.scale(t)))
        .collect::<Result<_, _>>()
        .map_err(PipelineError::Induced)?;

    let small = Domain::integers(1, k as i64).map_err(PipelineError::Induced)?;
    let gamma_coloring = Coloring::table_from_colors(small, r, &gamma);
    let u = match find_witness(m, &gamma_coloring, &SearchBounds::integer_box(k as i64, m.ncols()), opts) {
        Ok(Outcome::Found(cert)) => cert.witness().expect("witness certificate").0.to_vec(),
        Ok(Outcome::Exhausted { .. }) => {
            return Err(PipelineError::MWitness(format!("no monochromatic image over 1..={k}")))
        }
        Err(e) => return Err(PipelineError::MWitness(e.to_string())),
    };
    let mu = m.apply(&u).map_err(|e| PipelineError::MWitness(e.to_string()))?;
    let i = mu[0].clone();
    let j = gamma[i.to_i64().expect("image over 1..=k is integral") as usize - 1];

    let combined = diagonal_sum(m, n);
    let mut x: Vec<Rational> = u.iter().map(|t| t * &a).collect();
    x.extend(y.iter().map(|t| t * &i));
    let image = combined.apply(&x).map_err(|e| PipelineError::Input(e.to_string()))?;
    let certificate = Certificate {
        kind: CertificateKind::Witness,
        matrix: combined.clone(),
        coloring: Some(phi.clone()),
        truncation: combined.truncation(),
        payload: Payload::Witness {
            x,
            image,
            color: Some(j),
            targets: Vec::new(),
            nodes: 0,
        },
        epsilon: Some(epsilon.clone()),
        exhausted: false,
        engine: EngineInfo::new(opts.seed),
        surrogate: false,
    };
    let trace = PipelineTrace {
        k,
        z,
        product_classes: psi.r(),
        y,
        a,
        gamma,
        u,
        i,
        j,
    };
    Ok((certificate, trace))
}

impl From<SearchError> for PipelineError {
    fn from(e: SearchError) -> Self {
        PipelineError::Input(e.to_string())
    }
}
