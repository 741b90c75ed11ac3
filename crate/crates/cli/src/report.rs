//! The solve report document and the plain-column plot data emitter.

use ratfit::{Diagnostics, ErrorReport, SampleSet, SolveReport, SolverOptions, Termination};
use serde::{Deserialize, Serialize};

pub const REPORT_FORMAT: &str = "ratfit-report";
pub const REPORT_VERSION: &str = "1.0";

/// Everything a solve produced, in one self-contained document: the problem
/// shape, the options, the per-iteration trace, the final error measures, and
/// the optimality certificates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub format: String,
    pub version: String,
    pub problem: ProblemEcho,
    pub degrees: DegreesEcho,
    pub options: OptionsEcho,
    /// "gap-converged", "max-iterations", or "degenerate".
    pub termination: String,
    pub iterations: Vec<IterationEcho>,
    pub error: ErrorSummary,
    pub diagnostics: DiagnosticsEcho,
    /// Weights of the final bound evaluation (one per sample node).
    pub final_weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemEcho {
    pub sample_count: usize,
    pub shape: [usize; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreesEcho {
    pub numerator: Vec<Vec<usize>>,
    pub denominator: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptionsEcho {
    pub beta: f64,
    pub max_iterations: usize,
    pub gap_tol: f64,
    pub weight_floor: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationEcho {
    pub iteration: usize,
    /// Lower bound on the worst-case squared error at this iteration's
    /// weights.
    pub dual_value: f64,
    /// Worst squared per-node error of this iteration's approximant.
    pub max_sq_error: f64,
    /// |max_sq_error - dual_value| / max_sq_error.
    pub relative_gap: f64,
    pub active_nodes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorSummary {
    /// sqrt(mean squared per-node Frobenius error) over the sample nodes.
    pub rmse: f64,
    /// Worst squared per-node Frobenius error.
    pub max_sq_error: f64,
    /// sqrt(max_sq_error), the worst-case Frobenius error itself.
    pub worst_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsEcho {
    pub relative_gap: f64,
    pub slackness_residual: f64,
    pub extreme_point_count: usize,
    pub extreme_points: Vec<usize>,
    pub denominator_min_abs: f64,
}

pub fn termination_label(termination: Termination) -> &'static str {
    match termination {
        Termination::GapConverged => "gap-converged",
        Termination::MaxIterations => "max-iterations",
        Termination::Degenerate => "degenerate",
    }
}

pub fn build_report(
    samples: &SampleSet,
    numerator_degrees: &[Vec<usize>],
    denominator_degree: usize,
    options: &SolverOptions,
    solve: &SolveReport,
    errors: &ErrorReport,
    diagnostics: &Diagnostics,
) -> ReportDocument {
    let (rows, cols) = samples.shape();
    ReportDocument {
        format: REPORT_FORMAT.to_string(),
        version: REPORT_VERSION.to_string(),
        problem: ProblemEcho {
            sample_count: samples.len(),
            shape: [rows, cols],
        },
        degrees: DegreesEcho {
            numerator: numerator_degrees.to_vec(),
            denominator: denominator_degree,
        },
        options: OptionsEcho {
            beta: options.lawson_exponent,
            max_iterations: options.max_iterations,
            gap_tol: options.duality_gap_tol,
            weight_floor: options.weight_floor,
        },
        termination: termination_label(solve.termination).to_string(),
        iterations: solve
            .iterations
            .iter()
            .enumerate()
            .map(|(k, record)| IterationEcho {
                iteration: k,
                dual_value: record.dual_value,
                max_sq_error: record.max_sq_error,
                relative_gap: record.relative_gap,
                active_nodes: record.active_nodes,
            })
            .collect(),
        error: ErrorSummary {
            rmse: errors.rmse,
            max_sq_error: errors.max_sq_error,
            worst_error: errors.max_sq_error.sqrt(),
        },
        diagnostics: DiagnosticsEcho {
            relative_gap: diagnostics.relative_gap,
            slackness_residual: diagnostics.slackness_residual,
            extreme_point_count: diagnostics.extreme_points.len(),
            extreme_points: diagnostics.extreme_points.clone(),
            denominator_min_abs: diagnostics.denominator_min_abs,
        },
        final_weights: solve.final_weights.entries().to_vec(),
    }
}

/// Two plain-text column blocks for external plotting: per-node errors over
/// the node's imaginary part, then the dual/error trace over iterations.
pub fn plot_data(samples: &SampleSet, errors: &ErrorReport, solve: &SolveReport) -> String {
    let mut out = String::new();
    out.push_str("# node-imag fro-error\n");
    for (x, err) in samples.nodes().iter().zip(&errors.per_node_fro) {
        out.push_str(&format!("{:.16e} {:.16e}\n", x.im, err));
    }
    out.push('\n');
    out.push_str("# iteration dual-value max-sq-error\n");
    for (k, record) in solve.iterations.iter().enumerate() {
        out.push_str(&format!(
            "{k} {:.16e} {:.16e}\n",
            record.dual_value, record.max_sq_error
        ));
    }
    out
}
