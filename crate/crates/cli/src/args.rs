//! Command-line surface and its translation into a validated run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shapeinv::rational_poly::{int, parse_rational, Rational};
use shapeinv::{Error, Family, FamilyPoint, Params, Result};

#[derive(Debug, Parser)]
#[command(name = "shapeinv", version, about = "Verify extended shape-invariant superpotentials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact polynomial certificates of the compatibility condition.
    Identity(IdentityArgs),
    /// Numeric compatibility, shape-invariance and ODE residuals.
    Check(CommonArgs),
    /// Bound-state spectra of the extended and classical partner pairs.
    Spectrum(SpectrumArgs),
    /// Gauge covariance of the generalized compatibility condition.
    Gauge(GaugeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// radial-oscillator (ro), trig-dpt, hyp-dpt, radial-oscillator-contl, trig-dpt-contl
    #[arg(long)]
    pub family: String,
    /// Comma-separated values of g (rational "p/q" or decimal)
    #[arg(long)]
    pub g: String,
    /// Comma-separated values of h
    #[arg(long)]
    pub h: Option<String>,
    /// Comma-separated values of l
    #[arg(long, conflicts_with = "l_range")]
    pub l: Option<String>,
    /// Inclusive integer range of l, "a..b" or "a:b"
    #[arg(long)]
    pub l_range: Option<String>,
    /// Sample grid "min:max:n"
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Pass/fail tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Add this rational constant to ψ1- before building the identity
    #[arg(long)]
    pub perturb: Option<String>,
    /// Also certify each l for all couplings by instantiation
    #[arg(long)]
    pub symbolic: bool,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of levels
    #[arg(long, default_value_t = 5)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct GaugeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Gauge polynomial in x, such as "x^2" or "1+x^3"
    #[arg(long)]
    pub gauge: String,
}

/// Sample grid request `min:max:n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

/// Parsed and validated inputs shared by all commands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub family: Family,
    pub points: Vec<FamilyPoint>,
    pub grid: Option<GridSpec>,
    pub tol: Option<f64>,
    pub format: Format,
}

pub fn parse_list(text: &str) -> Result<Vec<Rational>> {
    text.split(',').map(|t| parse_rational(t.trim())).collect()
}

pub fn parse_l_range(text: &str) -> Result<Vec<Rational>> {
    let (a, b) = text
        .split_once("..")
        .or_else(|| text.split_once(':'))
        .ok_or_else(|| Error::Parse(format!("expected a..b, got {text:?}")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("l range bounds must be integers, got {s:?}")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if a < 0 || b < a {
        return Err(Error::Parse(format!("invalid l range {a}..{b}")));
    }
    Ok((a..=b).map(int).collect())
}

pub fn parse_grid(text: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::Parse(format!("expected min:max:n, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !min.is_finite() || !max.is_finite() || min >= max || n == 0 {
        return Err(bad());
    }
    Ok(GridSpec { min, max, n })
}

impl CommonArgs {
    pub fn to_config(&self) -> Result<RunConfig> {
        let family: Family = self.family.parse()?;
        let gs = parse_list(&self.g)?;
        let hs: Vec<Option<Rational>> = match &self.h {
            Some(h) => parse_list(h)?.into_iter().map(Some).collect(),
            None => vec![None],
        };
        let ls = match (&self.l, &self.l_range) {
            (Some(l), _) => parse_list(l)?,
            (None, Some(r)) => parse_l_range(r)?,
            (None, None) => return Err(Error::Parse("one of --l or --l-range is required".into())),
        };
        let mut points = Vec::new();
        for l in &ls {
            for g in &gs {
                for h in &hs {
                    points.push(FamilyPoint::new(family, Params::new(g.clone(), h.clone(), l.clone()))?);
                }
            }
        }
        if let Some(tol) = self.tol {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::Config(format!("--tol must be > 0, got {tol}")));
            }
        }
        Ok(RunConfig {
            family,
            points,
            grid: self.grid.as_deref().map(parse_grid).transpose()?,
            tol: self.tol,
            format: self.format,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use shapeinv::rational_poly::rat;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("2, 5/2,3.5").unwrap(), vec![int(2), rat(5, 2), rat(7, 2)]);
        assert_eq!(parse_l_range("1..3").unwrap(), vec![int(1), int(2), int(3)]);
        assert_eq!(parse_l_range("0:0").unwrap(), vec![int(0)]);
        assert!(parse_l_range("3..1").is_err());
        assert!(parse_l_range("1.5..3").is_err());
    }

    #[test]
    fn grid_spec() {
        assert_eq!(parse_grid("0.1:4:30").unwrap(), GridSpec { min: 0.1, max: 4.0, n: 30 });
        assert!(parse_grid("4:0.1:30").is_err());
        assert!(parse_grid("0.1:4").is_err());
    }

    #[test]
    fn parse_cli() {
        let cli = Cli::try_parse_from([
            "shapeinv", "check", "--family", "trig-dpt", "--g", "3", "--h", "4,5", "--l", "1,2",
        ])
        .unwrap();
        let Command::Check(args) = cli.command else { panic!() };
        let cfg = args.to_config().unwrap();
        assert_eq!(cfg.points.len(), 4);
        assert_eq!(cfg.points[0].to_string(), "family=trig-dpt g=3 h=4 l=1");
    }
}
