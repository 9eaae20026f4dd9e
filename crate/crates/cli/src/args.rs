use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use ipr_core::coloring::{Domain, DomainRule};
use ipr_core::construct::IpTailOracle;
use ipr_core::numeric::{parse_list, Rational};
use ipr_core::search::GeneratorRule;

use crate::io::CliError;

#[derive(Debug, Parser)]
#[command(name = "ipr", version, about = "Image partition regularity laboratory")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Write the JSON result here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for searches; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    /// Recorded in certificates.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Node budget (overrides IPR_BUDGET).
    #[arg(long, global = true)]
    pub budget: Option<u64>,
}

/// A matrix from a JSON file or a named family.
#[derive(Debug, Args)]
pub struct MatrixSource {
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub size: usize,
    /// Comma-separated family parameters (the tuple for `mt`).
    #[arg(long)]
    pub params: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a named matrix family.
    #[command(subcommand)]
    Families(FamiliesCmd),
    /// Structural report for a matrix or a segmented spec.
    Classify {
        file: PathBuf,
        #[arg(long)]
        breakpoints: Option<String>,
    },
    /// Block diagonal sum of two matrices.
    Diag { first: PathBuf, second: PathBuf },
    /// Milliken–Taylor value sets.
    #[command(subcommand)]
    Mt(MtCmd),
    /// Even zero block analytics of dyadic rationals.
    #[command(subcommand)]
    Dyadic(DyadicCmd),
    /// Check or derive colorings.
    #[command(subcommand)]
    Coloring(ColoringCmd),
    /// Exhaustive witness and avoiding-coloring searches.
    #[command(subcommand)]
    Search(SearchCmd),
    /// Compactness bounds.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// First candidate b keeping the compactness bound resolved after adding b*row.
    ExtendRow {
        #[command(flatten)]
        source: MatrixSource,
        #[arg(long, allow_hyphen_values = true)]
        row: String,
        #[arg(long, allow_hyphen_values = true)]
        candidates: String,
        #[arg(long)]
        colors: usize,
        #[arg(long, default_value_t = 12)]
        max: usize,
    },
    /// Per-color depth of two Milliken–Taylor patterns under the dyadic three-coloring.
    #[command(subcommand)]
    Separation(SeparationCmd),
    /// Explicit witnesses for the two example matrices.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Near-zero witness for diag(M, N).
    #[command(subcommand)]
    Pipeline(PipelineCmd),
    /// Block-by-block solver for segmented matrices.
    #[command(subcommand)]
    Segmented(SegmentedCmd),
    /// Re-check a certificate; exit 3 on any violation.
    Verify { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum FamiliesCmd {
    Build {
        #[arg(long)]
        family: String,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        params: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum MtCmd {
    /// Milliken–Taylor values of a tuple over a term sequence.
    Enum {
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long)]
        terms: String,
        /// Also print how many block patterns give each value.
        #[arg(long)]
        multiplicities: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum DyadicCmd {
    /// Number of even zero blocks.
    Phi { value: String },
    /// Class under the three-coloring by even zero blocks.
    Color { value: String },
}

#[derive(Debug, Subcommand)]
pub enum ColoringCmd {
    Validate {
        file: PathBuf,
    },
    /// Coloring by the tuple of base colors of x, 2x, ..., kx.
    Product {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        /// Domain of the product coloring (defaults to the base domain).
        #[arg(long, allow_hyphen_values = true)]
        domain: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SearchCmd {
    /// Lexicographically least x with M x monochromatic.
    Witness {
        #[command(flatten)]
        source: MatrixSource,
        #[arg(long)]
        coloring: PathBuf,
        /// Variable grid (defaults to the coloring's domain).
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long)]
        epsilon: Option<String>,
        /// Fail when an image leaves the coloring domain instead of skipping.
        #[arg(long)]
        strict: bool,
    },
    /// A coloring of the domain with no monochromatic image.
    Avoid {
        #[command(flatten)]
        source: MatrixSource,
        #[arg(long)]
        colors: usize,
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum BoundCmd {
    /// Least N such that every coloring of 1..=N has a monochromatic image.
    Compactness {
        #[command(flatten)]
        source: MatrixSource,
        #[arg(long)]
        colors: usize,
        #[arg(long, default_value_t = 12)]
        max: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum SeparationCmd {
    Depth {
        /// Exponent window `low,high`.
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long)]
        maxlen: usize,
        #[arg(long = "a", default_value = "1")]
        tuple_a: String,
        #[arg(long = "b", default_value = "1,2")]
        tuple_b: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConstructCmd {
    Ex16 {
        #[arg(long)]
        y: String,
    },
    /// Least row of ex16 exceeding the bound.
    Ex16Obstruction {
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "1")]
        bound: String,
    },
    Ex17 {
        #[arg(long)]
        y: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum PipelineCmd {
    Extend {
        #[arg(long)]
        finite: PathBuf,
        /// Truncation of the infinite block (defaults to the 1x1 identity).
        #[arg(long)]
        infinite: Option<PathBuf>,
        #[arg(long)]
        coloring: PathBuf,
        #[arg(long)]
        epsilon: String,
        #[arg(long, default_value_t = 16)]
        max_k: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum SegmentedCmd {
    Solve {
        #[arg(long)]
        spec: PathBuf,
        /// `base4:COUNT`, `base4:FIRST:COUNT` or a comma list of generators.
        #[arg(long)]
        generators: String,
        #[arg(long)]
        depth: usize,
    },
}

pub fn rational(s: &str) -> Result<Rational, CliError> {
    s.trim().parse().map_err(|e| CliError::Invalid(format!("{s}: {e}")))
}

pub fn rationals(s: &str) -> Result<Vec<Rational>, CliError> {
    Ok(parse_list(s)?)
}

pub fn integers(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| CliError::Invalid(format!("not an integer: {p}"))))
        .collect()
}

pub fn usizes(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| CliError::Invalid(format!("not an index: {p}"))))
        .collect()
}

fn range(s: &str) -> Result<(i64, i64), CliError> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| CliError::Invalid(format!("expected lo..hi, got {s}")))?;
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|_| CliError::Invalid(format!("bad bound {t}")));
    Ok((parse(a)?, parse(b)?))
}

/// `lo..hi` (integers), `dyadic:low..high` (exponent window),
/// `fractions:P/Q` or a comma list of rationals.
pub fn domain(s: &str) -> Result<Domain, CliError> {
    let rule = if let Some(w) = s.strip_prefix("dyadic:") {
        let (low, high) = range(w)?;
        DomainRule::DyadicWindow { low, high }
    } else if let Some(f) = s.strip_prefix("fractions:") {
        let (p, q) = f
            .split_once('/')
            .ok_or_else(|| CliError::Invalid(format!("expected fractions:P/Q, got {s}")))?;
        let n = |t: &str| t.parse::<u64>().map_err(|_| CliError::Invalid(format!("bad bound {t}")));
        DomainRule::Fractions {
            max_num: n(p)?,
            max_den: n(q)?,
        }
    } else if s.contains("..") {
        let (lo, hi) = range(s)?;
        DomainRule::Integers { lo, hi }
    } else {
        DomainRule::Explicit { points: rationals(s)? }
    };
    Ok(Domain::from_rule(rule)?)
}

pub fn oracle(s: &str) -> Result<IpTailOracle, CliError> {
    let rule = match s.strip_prefix("base4:") {
        Some(rest) => {
            let parts = usizes(rest)
                .or_else(|_| rest.split(':').map(|p| p.parse::<usize>()).collect::<Result<Vec<_>, _>>())
                .map_err(|_| CliError::Invalid(format!("bad generator spec {s}")))?;
            match parts[..] {
                [count] => GeneratorRule::Base4 { first: 1, count },
                [first, count] => GeneratorRule::Base4 {
                    first: first as i64,
                    count,
                },
                _ => return Err(CliError::Invalid(format!("bad generator spec {s}"))),
            }
        }
        None => GeneratorRule::Explicit {
            generators: rationals(s)?,
        },
    };
    Ok(IpTailOracle::new(rule)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domains() {
        assert_eq!(domain("1..4").unwrap().len(), 4);
        assert_eq!(domain("dyadic:-3..0").unwrap().len(), 15);
        assert_eq!(domain("1/2,1,3/2").unwrap().points()[0], rational("1/2").unwrap());
        assert_eq!(domain("fractions:2/2").unwrap().len(), 3);
        assert!(domain("4..1").is_err());
        assert!(domain("fractions:2").is_err());
    }

    #[test]
    fn oracles() {
        let o = oracle("base4:3").unwrap();
        assert_eq!(o.generators()[0], rational("1/4").unwrap());
        assert_eq!(o.generators().len(), 3);
        let o = oracle("base4:2:2").unwrap();
        assert_eq!(o.generators()[0], rational("1/16").unwrap());
        assert_eq!(oracle("1/2,1/3").unwrap().generators().len(), 2);
        assert!(oracle("base4:1:2:3").is_err());
        assert!(oracle("1/3,1/2").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(integers("-10, 0").unwrap(), vec![-10, 0]);
        assert!(integers("1,x").is_err());
        assert_eq!(usizes("0,3").unwrap(), vec![0, 3]);
        assert!(rational("1/0").is_err());
    }
}
