//! `ipr`: command-line front end for the ipr-core laboratory.
//!
//! Exit codes: 0 found / verified, 1 none (search exhausted), 2 node budget
//! exhausted, 3 invalid input or failed verification.

mod args;
mod io;

use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use ipr_core::coloring::{product_coloring, product_coloring_on, Coloring};
use ipr_core::construct::{
    ex16_obstruction, ex16_witness, ex17_witness, extension_pipeline, segmented_solve, PipelineConfig,
    TruncationSolver,
};
use ipr_core::matrix::{build_family, classify_matrix, compress, diagonal_sum, SegmentedSpec, SparseMatrix};
use ipr_core::mt::{mt_enumerate, TermSequence};
use ipr_core::numeric::{phi_even_zero_blocks, Dyadic, Rational};
use ipr_core::search::{
    compactness_bound, extend_with_row, find_avoiding_coloring, find_witness, separation_depth_search,
    verify_certificate, BoundOutcome, Certificate, CertificateKind, EngineInfo, Outcome, Payload, SearchBounds,
    SearchError, SearchOptions,
};

use args::*;
use io::{emit, read_json, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ipr: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn options(g: &Global) -> Result<SearchOptions, CliError> {
    let budget = match (g.budget, std::env::var("IPR_BUDGET")) {
        (Some(b), _) => b,
        (None, Ok(v)) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid(format!("IPR_BUDGET is not a number: {v}")))?,
        (None, Err(_)) => ipr_core::search::DEFAULT_BUDGET,
    };
    Ok(SearchOptions {
        budget,
        workers: g.workers.max(1),
        seed: g.seed,
    })
}

fn load_matrix(src: &MatrixSource) -> Result<SparseMatrix, CliError> {
    match (&src.matrix, &src.family) {
        (Some(path), None) => read_json(path),
        (None, Some(name)) => {
            let params = args::rationals(src.params.as_deref().unwrap_or(""))?;
            Ok(build_family(name, src.size, &params)?)
        }
        _ => Err(CliError::Invalid("give exactly one of --matrix or --family".into())),
    }
}

fn ordinary_witness(matrix: SparseMatrix, x: Vec<Rational>, seed: u64) -> Result<Certificate, CliError> {
    let image = matrix.apply(&x)?;
    Ok(Certificate {
        kind: CertificateKind::Witness,
        truncation: matrix.truncation(),
        matrix,
        coloring: None,
        payload: Payload::Witness {
            x,
            image,
            color: None,
            targets: Vec::new(),
            nodes: 0,
        },
        epsilon: None,
        exhausted: false,
        engine: EngineInfo::new(seed),
        surrogate: false,
    })
}

fn found_or_none<T: Serialize>(out: Outcome<T>, g: &Global, what: &str) -> Result<(), CliError> {
    match out {
        Outcome::Found(v) => emit(&v, g.output.as_deref()),
        Outcome::Exhausted { nodes } => Err(CliError::None(format!("no {what} (exhaustive, {nodes} nodes)"))),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Families(FamiliesCmd::Build { family, size, params }) => {
            let params = args::rationals(params.as_deref().unwrap_or(""))?;
            let m = build_family(family, *size, &params)?;
            emit(&m, g.output.as_deref())
        }
        Command::Classify { file, breakpoints } => {
            let value: serde_json::Value = read_json(file)?;
            if value.get("breakpoints").is_some() && value.get("matrix").is_some() {
                let spec: SegmentedSpec = serde_json::from_value(value).map_err(|e| CliError::Invalid(e.to_string()))?;
                return emit(&spec.report(), g.output.as_deref());
            }
            let m: SparseMatrix = serde_json::from_value(value).map_err(|e| CliError::Invalid(e.to_string()))?;
            let bps = breakpoints.as_deref().map(args::usizes).transpose()?;
            emit(&classify_matrix(&m, bps.as_deref())?, g.output.as_deref())
        }
        Command::Diag { first, second } => {
            let a: SparseMatrix = read_json(first)?;
            let b: SparseMatrix = read_json(second)?;
            emit(&diagonal_sum(&a, &b), g.output.as_deref())
        }
        Command::Mt(MtCmd::Enum {
            coeffs,
            terms,
            multiplicities,
        }) => {
            let tuple = compress(&args::rationals(coeffs)?)?;
            let x = TermSequence::new(args::rationals(terms)?).map_err(|e| CliError::Invalid(e.to_string()))?;
            let set = mt_enumerate(&tuple, &x).map_err(|e| CliError::Invalid(e.to_string()))?;
            if *multiplicities {
                emit(&set, g.output.as_deref())
            } else {
                emit(&set.values, g.output.as_deref())
            }
        }
        Command::Dyadic(DyadicCmd::Phi { value }) => {
            let v: Rational = value.parse().map_err(|e| CliError::Invalid(format!("{e}")))?;
            let phi = phi_even_zero_blocks(&v).map_err(|e| CliError::Invalid(e.to_string()))?;
            println!("{phi}");
            Ok(())
        }
        Command::Dyadic(DyadicCmd::Color { value }) => {
            let v: Rational = value.parse().map_err(|e| CliError::Invalid(format!("{e}")))?;
            let d = Dyadic::from_rational(&v).map_err(|e| CliError::Invalid(e.to_string()))?;
            let c = ipr_core::coloring::dyadic_three_color(&d)?;
            println!("{c}");
            Ok(())
        }
        Command::Coloring(ColoringCmd::Validate { file }) => {
            let c: Coloring = read_json(file)?;
            let report = c.validate();
            emit(&report, g.output.as_deref())?;
            if report.valid {
                Ok(())
            } else {
                Err(CliError::Invalid(report.violations.join("; ")))
            }
        }
        Command::Coloring(ColoringCmd::Product { file, k, domain }) => {
            let c: Coloring = read_json(file)?;
            let p = match domain {
                Some(d) => product_coloring_on(&c, *k, args::domain(d)?)?,
                None => product_coloring(&c, *k)?,
            };
            emit(&p, g.output.as_deref())
        }
        Command::Search(SearchCmd::Witness {
            source,
            coloring,
            grid,
            epsilon,
            strict,
        }) => {
            let m = load_matrix(source)?;
            let c: Coloring = read_json(coloring)?;
            let grid = match grid {
                Some(s) => args::domain(s)?.points().to_vec(),
                None => c.domain().points().to_vec(),
            };
            let opts = options(g)?;
            let mut bounds = SearchBounds::uniform(grid, m.ncols())
                .with_budget(opts.budget)
                .with_epsilon(epsilon.as_deref().map(args::rational).transpose()?);
            bounds.strict_domain = *strict;
            eprintln!("searching {} columns over {} grid points", m.ncols(), bounds.grids.first().map_or(0, Vec::len));
            found_or_none(find_witness(&m, &c, &bounds, &opts)?, g, "monochromatic image")
        }
        Command::Search(SearchCmd::Avoid { source, colors, domain }) => {
            let m = load_matrix(source)?;
            let d = args::domain(domain)?;
            let opts = options(g)?;
            eprintln!("searching {colors}-colorings of {} points", d.len());
            found_or_none(find_avoiding_coloring(&m, *colors, &d, &opts)?, g, "avoiding coloring")
        }
        Command::Bound(BoundCmd::Compactness { source, colors, max }) => {
            let m = load_matrix(source)?;
            let opts = options(g)?;
            match compactness_bound(&m, *colors, *max, &opts)? {
                BoundOutcome::Resolved(cert) => {
                    let n = match &cert.payload {
                        Payload::Bound { n, .. } => *n,
                        _ => unreachable!("bound certificates carry a bound payload"),
                    };
                    if let Some(path) = &g.output {
                        emit(&cert, Some(path))?;
                    }
                    println!("{n}");
                    Ok(())
                }
                BoundOutcome::Unresolved { max_n, .. } => {
                    Err(CliError::None(format!("unresolved: every N <= {max_n} admits an avoiding coloring")))
                }
            }
        }
        Command::ExtendRow {
            source,
            row,
            candidates,
            colors,
            max,
        } => {
            let m = load_matrix(source)?;
            let report = extend_with_row(
                &m,
                &args::rationals(row)?,
                &args::rationals(candidates)?,
                *colors,
                *max,
                &options(g)?,
            )?;
            emit(&report, g.output.as_deref())?;
            match report.chosen {
                Some(_) => Ok(()),
                None => Err(CliError::None("no candidate keeps the bound resolved at this scale".into())),
            }
        }
        Command::Separation(SeparationCmd::Depth {
            window,
            maxlen,
            tuple_a,
            tuple_b,
        }) => {
            let w = args::integers(window)?;
            let [low, high] = w[..] else {
                return Err(CliError::Invalid("--window takes two exponents low,high".into()));
            };
            let a = compress(&args::rationals(tuple_a)?)?;
            let b = compress(&args::rationals(tuple_b)?)?;
            let report = separation_depth_search((low, high), *maxlen, &a, &b, &options(g)?)?;
            emit(&report, g.output.as_deref())
        }
        Command::Construct(ConstructCmd::Ex16 { y }) => {
            let y = args::rationals(y)?;
            let x = ex16_witness(&y)?;
            let m = build_family("ex16", y.len(), &[])?;
            emit(&ordinary_witness(m, x, g.seed)?, g.output.as_deref())
        }
        Command::Construct(ConstructCmd::Ex16Obstruction { x, bound }) => {
            let k = ex16_obstruction(&args::rationals(x)?, &args::rational(bound)?)?;
            println!("{k}");
            Ok(())
        }
        Command::Construct(ConstructCmd::Ex17 { y }) => {
            let y = args::rationals(y)?;
            let x = ex17_witness(&y)?;
            let m = build_family("ex17", y.len(), &[])?;
            emit(&ordinary_witness(m, x, g.seed)?, g.output.as_deref())
        }
        Command::Pipeline(PipelineCmd::Extend {
            finite,
            infinite,
            coloring,
            epsilon,
            max_k,
        }) => {
            let m: SparseMatrix = read_json(finite)?;
            let n = match infinite {
                Some(p) => read_json(p)?,
                None => SparseMatrix::identity(1).with_family("identity").with_truncation(Some(1)),
            };
            let phi: Coloring = read_json(coloring)?;
            let config = PipelineConfig {
                max_k: *max_k,
                search: options(g)?,
            };
            let (cert, trace) =
                extension_pipeline(&m, &TruncationSolver { n }, &phi, &args::rational(epsilon)?, &config)
                    .map_err(|e| CliError::Invalid(e.to_string()))?;
            eprintln!("k = {}, z = {}, a = {}, color {}", trace.k, trace.z, trace.a, trace.j);
            emit(&cert, g.output.as_deref())
        }
        Command::Segmented(SegmentedCmd::Solve { spec, generators, depth }) => {
            let spec: SegmentedSpec = read_json(spec)?;
            let oracle = args::oracle(generators)?;
            let sol = segmented_solve(&spec, &oracle, *depth, g.seed)?;
            emit(&sol.certificate, g.output.as_deref())
        }
        Command::Verify { file } => {
            let cert: Certificate = read_json(file)?;
            let report = verify_certificate(&cert)?;
            emit(&report, g.output.as_deref())?;
            if report.ok {
                Ok(())
            } else {
                Err(CliError::Invalid(format!("verification failed: {}", report.violations.join("; "))))
            }
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::BudgetExhausted { .. } => CliError::Budget(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}
