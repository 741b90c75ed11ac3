//! Argument definitions and the small grammars for degrees and node ranges.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use ratfit::DegreeSpec;

#[derive(Debug, Parser)]
#[command(
    name = "ratfit",
    version,
    about = "Minimax rational fitting of sampled matrix-valued data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a rational approximant to a sampled-data problem file.
    Fit(FitArgs),
    /// Synthesize a built-in demo target, optionally add noise, and fit it.
    Demo(DemoArgs),
    /// Evaluate a stored approximant at fresh nodes.
    Eval(EvalArgs),
    /// Re-check a stored approximant against data and report certificates.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Problem document with sample nodes and matrix values.
    pub input: PathBuf,
    /// Degrees: uniform "n/d" or per-entry "n11,n12;n21,n22/d".
    #[arg(long, value_parser = DegreesArg::from_str)]
    pub degrees: DegreesArg,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Which built-in target to synthesize.
    #[arg(value_enum)]
    pub name: DemoName,
    /// Degrees override; each demo has a sensible default.
    #[arg(long, value_parser = DegreesArg::from_str)]
    pub degrees: Option<DegreesArg>,
    /// Number of sample nodes; each demo has its standard count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Noise level: standard deviation of the real and imaginary parts of
    /// the per-node perturbation.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Seed for the noise generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the synthesized (noisy) problem document here.
    #[arg(long)]
    pub out_data: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Args)]
#[command(group(
    ArgGroup::new("eval_nodes").required(true).args(["nodes", "imag_range"])
))]
pub struct EvalArgs {
    /// Stored approximant document.
    pub approximant: PathBuf,
    /// File with evaluation nodes: a problem document (its nodes are used)
    /// or a bare JSON array of [re, im] pairs.
    #[arg(long)]
    pub nodes: Option<PathBuf>,
    /// Inline nodes "start:end:count" on the imaginary axis, e.g. "1:100:201".
    #[arg(long, value_parser = ImagRange::from_str)]
    pub imag_range: Option<ImagRange>,
    /// Output path for the evaluated values (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Stored approximant document.
    pub approximant: PathBuf,
    /// Problem document to check the approximant against.
    pub data: PathBuf,
    /// Nodes whose squared error is within this relative distance of the
    /// worst one count as extreme.
    #[arg(long, default_value_t = 1e-3)]
    pub extreme_tol: f64,
    /// Output path for the diagnostics document (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Solver knobs shared by `fit` and `demo`.
#[derive(Debug, Args)]
pub struct SolverFlags {
    /// Exponent applied to per-node errors in the weight update, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Maximum number of weight updates.
    #[arg(long, default_value_t = 100)]
    pub maxit: usize,
    /// Stop when the relative duality gap falls below this; 0 disables the
    /// check and runs exactly --maxit updates.
    #[arg(long, default_value_t = 1e-3)]
    pub gap_tol: f64,
    /// Weights at or below this are dropped from the active set for good.
    #[arg(long, default_value_t = 0.0)]
    pub weight_floor: f64,
}

/// Output paths shared by `fit` and `demo`.
#[derive(Debug, Args)]
pub struct OutputFlags {
    /// Write the fitted approximant document here.
    #[arg(long)]
    pub out_fit: Option<PathBuf>,
    /// Write the solve report document here.
    #[arg(long)]
    pub out_report: Option<PathBuf>,
    /// Write plain-column plot data (per-node errors, dual trace) here.
    #[arg(long)]
    pub out_plotdata: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    /// 2x2 symmetric rational target sampled on the segment from 1i to 100i.
    Example1,
    /// 2x2 symmetric transcendental target sampled log-spaced on [0.01, 10]i.
    Example2,
    /// 3x1 vector of duplexer scattering responses on [-2i, -1i].
    Duplexer,
}

impl fmt::Display for DemoName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DemoName::Example1 => "example1",
            DemoName::Example2 => "example2",
            DemoName::Duplexer => "duplexer",
        };
        f.write_str(name)
    }
}

/// Error for the small argument grammars.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ParseArgError(String);

/// Requested degrees before the data shape is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegreesArg {
    /// One numerator degree for every entry: "n/d".
    Uniform {
        numerator: usize,
        denominator: usize,
    },
    /// Explicit per-entry numerator degrees: rows split by ';', columns by ','.
    Matrix {
        numerators: Vec<Vec<usize>>,
        denominator: usize,
    },
}

impl DegreesArg {
    /// Binds the request to a concrete data shape.
    pub fn resolve(&self, rows: usize, cols: usize) -> Result<DegreeSpec, ParseArgError> {
        match self {
            DegreesArg::Uniform {
                numerator,
                denominator,
            } => DegreeSpec::uniform(rows, cols, *numerator, *denominator)
                .map_err(|e| ParseArgError(e.to_string())),
            DegreesArg::Matrix {
                numerators,
                denominator,
            } => {
                if numerators.len() != rows || numerators[0].len() != cols {
                    return Err(ParseArgError(format!(
                        "--degrees describes a {}x{} matrix but the data is {rows}x{cols}",
                        numerators.len(),
                        numerators[0].len()
                    )));
                }
                DegreeSpec::new(numerators.clone(), *denominator)
                    .map_err(|e| ParseArgError(e.to_string()))
            }
        }
    }
}

impl FromStr for DegreesArg {
    type Err = ParseArgError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let (left, right) = text.split_once('/').ok_or_else(|| {
            ParseArgError(format!(
                "expected \"n/d\" or \"n11,n12;n21,n22/d\", got \"{text}\""
            ))
        })?;
        let denominator: usize = right.trim().parse().map_err(|_| {
            ParseArgError(format!(
                "denominator degree \"{right}\" is not a nonnegative integer"
            ))
        })?;
        let rows: Vec<Vec<usize>> = left
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|cell| {
                        cell.trim().parse::<usize>().map_err(|_| {
                            ParseArgError(format!(
                                "numerator degree \"{cell}\" is not a nonnegative integer"
                            ))
                        })
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        if rows.is_empty() || rows[0].is_empty() {
            return Err(ParseArgError("empty degree list".into()));
        }
        if rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(ParseArgError(
                "all rows in --degrees must have the same number of columns".into(),
            ));
        }
        if rows.len() == 1 && rows[0].len() == 1 {
            return Ok(DegreesArg::Uniform {
                numerator: rows[0][0],
                denominator,
            });
        }
        Ok(DegreesArg::Matrix {
            numerators: rows,
            denominator,
        })
    }
}

/// Equispaced nodes on the imaginary axis: "start:end:count".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagRange {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl ImagRange {
    pub fn nodes(&self) -> Vec<num_complex::Complex64> {
        if self.count == 1 {
            return vec![num_complex::Complex64::new(0.0, self.start)];
        }
        (0..self.count)
            .map(|l| {
                let y = self.start + (self.end - self.start) * l as f64 / (self.count - 1) as f64;
                num_complex::Complex64::new(0.0, y)
            })
            .collect()
    }
}

impl FromStr for ImagRange {
    type Err = ParseArgError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, end, count] = parts.as_slice() else {
            return Err(ParseArgError(format!(
                "expected \"start:end:count\", got \"{text}\""
            )));
        };
        let start: f64 = start
            .trim()
            .parse()
            .map_err(|_| ParseArgError(format!("range start \"{start}\" is not a number")))?;
        let end: f64 = end
            .trim()
            .parse()
            .map_err(|_| ParseArgError(format!("range end \"{end}\" is not a number")))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| ParseArgError(format!("range count \"{count}\" is not an integer")))?;
        if !start.is_finite() || !end.is_finite() {
            return Err(ParseArgError("range endpoints must be finite".into()));
        }
        if count == 0 {
            return Err(ParseArgError("range count must be positive".into()));
        }
        Ok(ImagRange { start, end, count })
    }
}
