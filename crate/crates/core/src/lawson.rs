//! The reweighting loop: filter, evaluate the bound, check the gap, update.
//!
//! Each pass evaluates the weighted lower bound at the current node weights,
//! measures the worst-case error of the induced approximant, and multiplies
//! every weight by that node's error to a fixed power. Mass drifts toward the
//! worst nodes; the bound rises toward the achieved error; iteration stops
//! when the relative gap between the two closes (or a fixed budget runs out,
//! or the target turns out to be exactly representable).

use crate::approximant::RationalApproximant;
use crate::dual::evaluate_dual;
use crate::error::Error;
use crate::model::{compute_errors, validate, DegreeSpec, SampleSet, WeightVector};

/// Knobs of the reweighting loop.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Power applied to per-node errors in the weight update, in `(0, 1]`.
    pub lawson_exponent: f64,
    /// Number of weight updates to run at most. The bound is evaluated once
    /// more than this: a run with `max_iterations = k` produces `k + 1`
    /// iteration records.
    pub max_iterations: usize,
    /// Stop once `|e - d| / e` falls below this. Zero disables the check and
    /// runs exactly `max_iterations` updates.
    pub duality_gap_tol: f64,
    /// Nodes with weight at or below this are dropped from the active set
    /// (and stay dropped; their weight is pinned to zero).
    pub weight_floor: f64,
    /// Starting weights; uniform when absent.
    pub initial_weights: Option<WeightVector>,
    /// Worst-case errors below this mean the target is exactly representable;
    /// the relative gap would divide by zero, so the solve ends Degenerate.
    pub absolute_gap_floor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            lawson_exponent: 1.0,
            max_iterations: 100,
            duality_gap_tol: 1e-3,
            weight_floor: 0.0,
            initial_weights: None,
            absolute_gap_floor: crate::approximant::ABSOLUTE_GAP_FLOOR,
        }
    }
}

impl SolverOptions {
    fn check(&self) -> Result<(), Error> {
        if !(self.lawson_exponent > 0.0 && self.lawson_exponent <= 1.0) {
            return Err(Error::InvalidOptions {
                message: format!(
                    "lawson_exponent must lie in (0, 1], got {}",
                    self.lawson_exponent
                ),
            });
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidOptions {
                message: "max_iterations must be positive".into(),
            });
        }
        for (name, value) in [
            ("duality_gap_tol", self.duality_gap_tol),
            ("weight_floor", self.weight_floor),
            ("absolute_gap_floor", self.absolute_gap_floor),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidOptions {
                    message: format!("{name} must be finite and >= 0, got {value}"),
                });
            }
        }
        Ok(())
    }
}

/// Why the loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The relative gap fell below `duality_gap_tol`: the approximant is
    /// certified minimax to that tolerance.
    GapConverged,
    /// The update budget ran out first.
    MaxIterations,
    /// The target is exactly representable (worst error under the absolute
    /// floor, or all weighted errors vanished).
    Degenerate,
}

/// One row of the iteration trace.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    /// The (filtered, renormalized) weights this iteration evaluated at.
    pub weights: WeightVector,
    /// Lower bound at this iteration's weights.
    pub dual_value: f64,
    /// Worst squared per-node error of this iteration's approximant.
    pub max_sq_error: f64,
    /// `|max_sq_error - dual_value| / max_sq_error`, zero when the error sits
    /// under the absolute floor.
    pub relative_gap: f64,
    /// Nodes that entered the bases this iteration.
    pub active_nodes: usize,
}

/// Full trace of a solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: Vec<IterationRecord>,
    /// Weights used by the final bound evaluation.
    pub final_weights: WeightVector,
    pub termination: Termination,
}

impl SolveReport {
    /// Convenience view of the final iteration.
    pub fn last(&self) -> &IterationRecord {
        self.iterations
            .last()
            .expect("a solve records at least one iteration")
    }
}

/// Multiplicative weight update: `w_l' = w_l * err_l^beta / sum`, zero
/// weights stay zero.
///
/// # Errors
/// `AllMassVanished` when every weighted error is zero (the caller should
/// treat the fit as exact); `DimensionMismatch` and `InvalidOptions` on
/// malformed input.
pub fn update_weights(
    weights: &WeightVector,
    per_node_fro: &[f64],
    beta: f64,
) -> Result<WeightVector, Error> {
    if weights.len() != per_node_fro.len() {
        return Err(Error::dims(format!(
            "{} weights but {} per-node errors",
            weights.len(),
            per_node_fro.len()
        )));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidOptions {
            message: format!("exponent must lie in (0, 1], got {beta}"),
        });
    }
    let masses: Vec<f64> = weights
        .entries()
        .iter()
        .zip(per_node_fro)
        .map(|(&w, &e)| w * e.powf(beta))
        .collect();
    WeightVector::normalized(masses)
}

/// Runs the reweighting loop and returns the final approximant with the full
/// iteration trace.
///
/// # Errors
/// `InfeasibleAfterFiltering` when filtering starves the active set,
/// `Breakdown` from basis construction, `NonFiniteData` if an unbounded
/// rational value poisons the error measure, plus validation errors.
pub fn solve(
    samples: &SampleSet,
    degrees: &DegreeSpec,
    options: &SolverOptions,
) -> Result<(RationalApproximant, SolveReport), Error> {
    validate(samples, degrees)?;
    options.check()?;
    let m = samples.len();
    let mut weights = match &options.initial_weights {
        Some(w) => {
            if w.len() != m {
                return Err(Error::dims(format!(
                    "{} initial weights for {m} samples",
                    w.len()
                )));
            }
            w.clone()
        }
        None => WeightVector::uniform(m)?,
    };

    let mut iterations = Vec::new();
    loop {
        // Filtering: pin weights at or below the floor to exact zero, then
        // renormalize the survivors. Zero is absorbing, so a filtered node
        // never re-enters.
        weights = filter_weights(&weights, options.weight_floor, degrees)?;

        let evaluation = evaluate_dual(samples, degrees, &weights, options.weight_floor)?;
        let errors = compute_errors(samples, &evaluation.rational_at_nodes)?;
        let max_sq = errors.max_sq_error;
        if !max_sq.is_finite() {
            return Err(Error::NonFiniteData {
                location: format!(
                    "worst-case error at iteration {} (denominator vanished at nodes {:?})",
                    iterations.len(),
                    evaluation.denominator_vanished
                ),
            });
        }
        let degenerate = max_sq < options.absolute_gap_floor;
        let relative_gap = if degenerate {
            0.0
        } else {
            (max_sq - evaluation.dual_value).abs() / max_sq
        };
        iterations.push(IterationRecord {
            weights: weights.clone(),
            dual_value: evaluation.dual_value,
            max_sq_error: max_sq,
            relative_gap,
            active_nodes: evaluation.active_indices.len(),
        });

        let termination = if degenerate {
            Some(Termination::Degenerate)
        } else if relative_gap < options.duality_gap_tol {
            Some(Termination::GapConverged)
        } else if iterations.len() > options.max_iterations {
            Some(Termination::MaxIterations)
        } else {
            None
        };

        if let Some(termination) = termination {
            let approximant =
                RationalApproximant::from_evaluation(evaluation, degrees.clone(), weights.clone());
            let report = SolveReport {
                iterations,
                final_weights: weights,
                termination,
            };
            return Ok((approximant, report));
        }

        weights = match update_weights(&weights, &errors.per_node_fro, options.lawson_exponent) {
            Ok(next) => next,
            // Every weighted error is zero while some unweighted one is not:
            // the fit is exact on the active set. Stop and report it.
            Err(Error::AllMassVanished) => {
                let approximant = RationalApproximant::from_evaluation(
                    evaluation,
                    degrees.clone(),
                    weights.clone(),
                );
                let report = SolveReport {
                    iterations,
                    final_weights: weights,
                    termination: Termination::Degenerate,
                };
                return Ok((approximant, report));
            }
            Err(other) => return Err(other),
        };
    }
}

/// Zeroes weights at or below the floor and renormalizes the rest.
fn filter_weights(
    weights: &WeightVector,
    floor: f64,
    degrees: &DegreeSpec,
) -> Result<WeightVector, Error> {
    let active = weights.active_indices(floor);
    let required = degrees.required_samples();
    if active.len() < required {
        return Err(Error::InfeasibleAfterFiltering {
            active: active.len(),
            required,
        });
    }
    if active.len() == weights.len() {
        return Ok(weights.clone());
    }
    let masses: Vec<f64> = weights
        .entries()
        .iter()
        .map(|&w| if w > floor { w } else { 0.0 })
        .collect();
    WeightVector::normalized(masses)
}
