//! Implementations of the four subcommands.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use ratfit::{
    compute_errors, diagnose, evaluate_dual, solve, RationalApproximant, SampleSet, SolverOptions,
    WeightVector, DEFAULT_EXTREME_TOL,
};
use serde::Serialize;

use crate::args::{
    Cli, Command, DemoArgs, DiagnoseArgs, EvalArgs, FitArgs, OutputFlags, SolverFlags,
};
use crate::demo::{default_degrees, DemoSpec};
use crate::problem::{self, ProblemDocument};
use crate::report;

/// Anything that should terminate the process with exit code 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Solver(#[from] ratfit::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn parse(path: &Path, message: String) -> Self {
        CliError::Parse {
            path: path.display().to_string(),
            message,
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Serializes one of the CLI's plain document structs; these have no failing
/// serialization paths.
pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    ratfit::json::to_string(value).expect("document serializes")
}

pub(crate) fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    let mut text = content.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Runs one parsed invocation. The returned integer is the process exit code
/// for successful command execution (0, or 2 when the iteration budget ran
/// out); errors map to exit code 1 in [`crate::run_from_env`].
pub fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Demo(args) => cmd_demo(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Diagnose(args) => cmd_diagnose(args),
    }
}

fn solver_options(flags: &SolverFlags) -> SolverOptions {
    SolverOptions {
        lawson_exponent: flags.beta,
        max_iterations: flags.maxit,
        duality_gap_tol: flags.gap_tol,
        weight_floor: flags.weight_floor,
        ..SolverOptions::default()
    }
}

fn cmd_fit(args: FitArgs) -> Result<i32, CliError> {
    let doc = problem::read_problem(&args.input)?;
    let samples = doc
        .to_sample_set()
        .map_err(|message| CliError::parse(&args.input, message))?;
    let (rows, cols) = samples.shape();
    let degrees = args
        .degrees
        .resolve(rows, cols)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    fit_and_emit(&samples, degrees, &args.solver, &args.output, None)
}

fn cmd_demo(args: DemoArgs) -> Result<i32, CliError> {
    let spec =
        DemoSpec::new(args.name, args.samples, args.noise, args.seed).map_err(CliError::Usage)?;
    let samples = spec.synthesize()?;
    let (rows, cols) = samples.shape();
    let degrees = args
        .degrees
        .unwrap_or_else(|| default_degrees(args.name))
        .resolve(rows, cols)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(path) = &args.out_data {
        let doc = ProblemDocument::from_sample_set(&samples, Some(spec.metadata()));
        problem::write_problem(path, &doc)?;
    }
    fit_and_emit(&samples, degrees, &args.solver, &args.output, None)
}

/// The shared tail of `fit` and `demo`: solve, write whatever outputs were
/// requested, print a summary line, and turn the termination into an exit
/// code. Outputs are written even when the budget ran out, so a partial
/// answer is never lost.
fn fit_and_emit(
    samples: &SampleSet,
    degrees: ratfit::DegreeSpec,
    solver: &SolverFlags,
    output: &OutputFlags,
    out_data: Option<(&PathBuf, &ProblemDocument)>,
) -> Result<i32, CliError> {
    if let Some((path, doc)) = out_data {
        problem::write_problem(path, doc)?;
    }
    let options = solver_options(solver);
    let (approximant, solve_report) = solve(samples, &degrees, &options)?;
    let evaluation = approximant.evaluate(samples.nodes())?;
    let errors = compute_errors(samples, &evaluation.values)?;
    let diagnostics = diagnose(
        &approximant,
        samples,
        solve_report.last().dual_value,
        DEFAULT_EXTREME_TOL,
    )?;

    if let Some(path) = &output.out_fit {
        write_file(path, &ratfit::serialize(&approximant))?;
    }
    if let Some(path) = &output.out_report {
        let doc = report::build_report(
            samples,
            degrees.numerator_degrees(),
            degrees.denominator_degree(),
            &options,
            &solve_report,
            &errors,
            &diagnostics,
        );
        write_file(path, &to_json(&doc))?;
    }
    if let Some(path) = &output.out_plotdata {
        write_file(path, &report::plot_data(samples, &errors, &solve_report))?;
    }

    let last = solve_report.last();
    println!(
        "{}: iterations={} rmse={:.4e} worst-error={:.4e} dual={:.4e} gap={:.4e} slackness={:.4e}",
        report::termination_label(solve_report.termination),
        solve_report.iterations.len(),
        errors.rmse,
        errors.max_sq_error.sqrt(),
        last.dual_value,
        last.relative_gap,
        diagnostics.slackness_residual,
    );

    Ok(match solve_report.termination {
        ratfit::Termination::MaxIterations => 2,
        _ => 0,
    })
}

fn load_approximant(path: &Path) -> Result<RationalApproximant, CliError> {
    let text = read_file(path)?;
    let loaded = ratfit::deserialize(&text)?;
    for warning in &loaded.warnings {
        eprintln!("warning: {}: {warning}", path.display());
    }
    Ok(loaded.approximant)
}

fn cmd_eval(args: EvalArgs) -> Result<i32, CliError> {
    let approximant = load_approximant(&args.approximant)?;
    let nodes: Vec<Complex64> = match (&args.nodes, &args.imag_range) {
        (Some(path), None) => problem::read_nodes(path)?,
        (None, Some(range)) => range.nodes(),
        // clap's argument group enforces exactly one source.
        _ => unreachable!("argument group guarantees one node source"),
    };
    if nodes.is_empty() {
        return Err(CliError::Usage("no evaluation nodes given".into()));
    }
    let evaluation = approximant.evaluate(&nodes)?;
    for &l in &evaluation.vanished_nodes {
        eprintln!(
            "warning: denominator vanished at node {l} ({:.6e} + {:.6e}i); \
             entries there are written as null",
            nodes[l].re, nodes[l].im
        );
    }
    let doc = ProblemDocument::from_evaluated(&nodes, &evaluation.values, None);
    emit(args.out.as_deref(), &to_json(&doc))?;
    Ok(0)
}

/// What `diagnose` writes: the certificates plus the error measures they
/// certify, re-derived from the stored fit and the given data.
#[derive(Debug, Serialize)]
struct DiagnosticsDocument {
    format: &'static str,
    version: &'static str,
    dual_value: f64,
    rmse: f64,
    max_sq_error: f64,
    relative_gap: f64,
    slackness_residual: f64,
    extreme_point_count: usize,
    extreme_points: Vec<usize>,
    denominator_min_abs: f64,
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<i32, CliError> {
    let approximant = load_approximant(&args.approximant)?;
    let doc = problem::read_problem(&args.data)?;
    let samples = doc
        .to_sample_set()
        .map_err(|message| CliError::parse(&args.data, message))?;
    // Re-derive the lower bound at the stored fit weights, so the report is
    // self-contained rather than trusting a value from another file.
    let weights = WeightVector::new(approximant.fit_weights().entries().to_vec())?;
    let dual = evaluate_dual(&samples, approximant.degrees(), &weights, 0.0)?;
    let diagnostics = diagnose(&approximant, &samples, dual.dual_value, args.extreme_tol)?;
    let evaluation = approximant.evaluate(samples.nodes())?;
    let errors = compute_errors(&samples, &evaluation.values)?;
    let out = DiagnosticsDocument {
        format: "ratfit-diagnostics",
        version: "1.0",
        dual_value: dual.dual_value,
        rmse: errors.rmse,
        max_sq_error: errors.max_sq_error,
        relative_gap: diagnostics.relative_gap,
        slackness_residual: diagnostics.slackness_residual,
        extreme_point_count: diagnostics.extreme_points.len(),
        extreme_points: diagnostics.extreme_points,
        denominator_min_abs: diagnostics.denominator_min_abs,
    };
    emit(args.out.as_deref(), &to_json(&out))?;
    Ok(0)
}

fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => write_file(path, content),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;
    use nalgebra::DMatrix;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).unwrap()
    }

    fn write_demo_problem(dir: &Path) -> PathBuf {
        let nodes: Vec<Complex64> = (0..14)
            .map(|l| Complex64::new(0.0, 1.0 + 0.3 * l as f64))
            .collect();
        let values: Vec<DMatrix<Complex64>> = nodes
            .iter()
            .map(|&x| {
                DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0) / ((x + 2.0) * (x + 2.0)))
            })
            .collect();
        let samples = SampleSet::new(nodes, values).unwrap();
        let doc = ProblemDocument::from_sample_set(&samples, None);
        let path = dir.join("problem.json");
        problem::write_problem(&path, &doc).unwrap();
        path
    }

    #[test]
    fn fit_writes_all_outputs_and_reports_success() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_demo_problem(dir.path());
        let fit_path = dir.path().join("fit.json");
        let report_path = dir.path().join("report.json");
        let plot_path = dir.path().join("plot.dat");
        let cli = parse(&[
            "ratfit",
            "fit",
            input.to_str().unwrap(),
            "--degrees",
            "2/2",
            "--maxit",
            "8",
            "--out-fit",
            fit_path.to_str().unwrap(),
            "--out-report",
            report_path.to_str().unwrap(),
            "--out-plotdata",
            plot_path.to_str().unwrap(),
        ]);
        let code = execute(cli).unwrap();
        assert!(code == 0 || code == 2);

        let loaded = ratfit::deserialize(&std::fs::read_to_string(&fit_path).unwrap()).unwrap();
        assert!(loaded.warnings.is_empty());
        let report: report::ReportDocument =
            serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
        assert_eq!(report.problem.sample_count, 14);
        assert!(std::fs::read_to_string(&plot_path)
            .unwrap()
            .starts_with("# node-imag"));
    }

    #[test]
    fn missing_input_is_an_error_naming_the_path() {
        let cli = parse(&["ratfit", "fit", "/no/such/file.json", "--degrees", "2/2"]);
        let err = execute(cli).unwrap_err();
        assert!(matches!(err, CliError::Io { .. }));
        assert!(err.to_string().contains("/no/such/file.json"));
    }

    #[test]
    fn infeasible_degrees_surface_the_sample_requirement() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_demo_problem(dir.path());
        let cli = parse(&[
            "ratfit",
            "fit",
            input.to_str().unwrap(),
            "--degrees",
            "9/9", // needs 9 + 9 + 2 = 20 samples, only 14 given
        ]);
        let err = execute(cli).unwrap_err();
        let message = err.to_string();
        assert!(
            message.contains("20"),
            "requirement missing from: {message}"
        );
        assert!(
            message.contains("14"),
            "actual count missing from: {message}"
        );
    }

    #[test]
    fn eval_round_trips_the_fit_at_the_sample_nodes() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_demo_problem(dir.path());
        let fit_path = dir.path().join("fit.json");
        execute(parse(&[
            "ratfit",
            "fit",
            input.to_str().unwrap(),
            "--degrees",
            "2/2",
            "--out-fit",
            fit_path.to_str().unwrap(),
        ]))
        .unwrap();

        let out_path = dir.path().join("eval.json");
        let code = execute(parse(&[
            "ratfit",
            "eval",
            fit_path.to_str().unwrap(),
            "--nodes",
            input.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ]))
        .unwrap();
        assert_eq!(code, 0);

        let evaluated = problem::read_problem(&out_path).unwrap();
        let original = problem::read_problem(&input).unwrap();
        assert_eq!(evaluated.nodes, original.nodes);
        for (a, b) in evaluated.values.iter().zip(&original.values) {
            let a = a[0][0].unwrap();
            let b = b[0][0].unwrap();
            let diff = Complex64::new(a[0] - b[0], a[1] - b[1]).norm();
            assert!(diff < 1e-9, "evaluated {a:?} vs sampled {b:?}");
        }
    }

    #[test]
    fn diagnose_emits_certificates() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_demo_problem(dir.path());
        let fit_path = dir.path().join("fit.json");
        execute(parse(&[
            "ratfit",
            "fit",
            input.to_str().unwrap(),
            "--degrees",
            "2/2",
            "--out-fit",
            fit_path.to_str().unwrap(),
        ]))
        .unwrap();

        let out_path = dir.path().join("diag.json");
        let code = execute(parse(&[
            "ratfit",
            "diagnose",
            fit_path.to_str().unwrap(),
            input.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ]))
        .unwrap();
        assert_eq!(code, 0);
        let text = std::fs::read_to_string(&out_path).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["format"], "ratfit-diagnostics");
        assert!(value["slackness_residual"].as_f64().unwrap() >= 0.0);
        assert!(value["extreme_point_count"].as_u64().unwrap() >= 1);
    }

    #[test]
    fn demo_writes_reproducible_data() {
        let dir = tempfile::tempdir().unwrap();
        let first = dir.path().join("a.json");
        let second = dir.path().join("b.json");
        for path in [&first, &second] {
            let code = execute(parse(&[
                "ratfit",
                "demo",
                "example1",
                "--samples",
                "30",
                "--noise",
                "1e-6",
                "--seed",
                "5",
                "--maxit",
                "2",
                "--gap-tol",
                "0",
                "--out-data",
                path.to_str().unwrap(),
            ]))
            .unwrap();
            assert_eq!(code, 2, "fixed two-update budget never closes the gap");
        }
        let a = std::fs::read(&first).unwrap();
        let b = std::fs::read(&second).unwrap();
        assert_eq!(a, b, "same demo spec must serialize identically");
    }

    #[test]
    fn malformed_problem_reports_line_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.json");
        std::fs::write(&path, "{\n  \"format\": \"ratfit-problem\",\n  oops\n}").unwrap();
        let cli = parse(&["ratfit", "fit", path.to_str().unwrap(), "--degrees", "1/1"]);
        let err = execute(cli).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("line 3"), "got: {message}");
    }
}
