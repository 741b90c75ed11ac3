//! The fitted rational function: portable representation, evaluation at
//! arbitrary nodes, and optimality diagnostics.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::arnoldi::ArnoldiBasis;
use crate::document;
use crate::dual::{divide_guarded, DualEvaluation, DENOMINATOR_GUARD};
use crate::error::Error;
use crate::model::{compute_errors, DegreeSpec, SampleSet, WeightVector};

/// Worst-case errors below this count as an exact fit; relative quantities
/// that would divide by the error short-circuit to zero.
pub(crate) const ABSOLUTE_GAP_FLOOR: f64 = 1e-15;

/// A fitted matrix-valued rational function `R = P / q`: per-entry numerator
/// coordinates, shared denominator coordinates, and the basis recurrences
/// needed to evaluate both anywhere.
#[derive(Debug, Clone)]
pub struct RationalApproximant {
    degrees: DegreeSpec,
    denom_coeffs: DVector<Complex64>,
    numer_coeffs: Vec<Vec<DVector<Complex64>>>,
    denom_basis: ArnoldiBasis,
    numer_basis: ArnoldiBasis,
    fit_weights: WeightVector,
}

/// Values of an approximant at a list of nodes, with explicit markers for
/// nodes where the denominator vanished.
#[derive(Debug, Clone)]
pub struct Evaluation {
    /// One `s x t` matrix per node. Entries at vanished nodes are infinite.
    pub values: Vec<DMatrix<Complex64>>,
    /// Denominator value at each node.
    pub denominator: Vec<Complex64>,
    /// Nodes whose denominator magnitude fell below the guard.
    pub vanished_nodes: Vec<usize>,
}

/// Optimality evidence for a fit against a sample set.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    /// `|e - d| / e` where `e` is the worst squared error and `d` the lower
    /// bound; zero when `e` sits under the absolute floor. Small values
    /// certify the fit as minimax to that tolerance.
    pub relative_gap: f64,
    /// Worst violation of complementary slackness,
    /// `max_l |w_l * (e - ||F(x_l) - R(x_l)||_F^2)|`: at an optimum, weight
    /// concentrates only on nodes attaining the worst error.
    pub slackness_residual: f64,
    /// Nodes whose squared error reaches `(1 - extreme_tol) * e`.
    pub extreme_points: Vec<usize>,
    /// Smallest denominator magnitude over the sample nodes. A healthy fit
    /// keeps this well away from zero.
    pub denominator_min_abs: f64,
}

/// A deserialized approximant plus any compatibility notes produced while
/// reading an older document.
#[derive(Debug, Clone)]
pub struct LoadedApproximant {
    pub approximant: RationalApproximant,
    pub warnings: Vec<String>,
}

impl RationalApproximant {
    /// Packages the output of a bound evaluation as a standalone function.
    pub(crate) fn from_evaluation(
        evaluation: DualEvaluation,
        degrees: DegreeSpec,
        fit_weights: WeightVector,
    ) -> Self {
        RationalApproximant {
            degrees,
            denom_coeffs: evaluation.denom_coeffs,
            numer_coeffs: evaluation.numer_coeffs,
            denom_basis: evaluation.denom_basis,
            numer_basis: evaluation.numer_basis,
            fit_weights,
        }
    }

    /// Assembles an approximant from raw parts, checking consistency.
    /// Used by document loading.
    pub(crate) fn from_parts(
        degrees: DegreeSpec,
        denom_coeffs: DVector<Complex64>,
        numer_coeffs: Vec<Vec<DVector<Complex64>>>,
        denom_basis: ArnoldiBasis,
        numer_basis: ArnoldiBasis,
        fit_weights: WeightVector,
    ) -> Result<Self, Error> {
        let (s, t) = degrees.shape();
        if numer_coeffs.len() != s || numer_coeffs.iter().any(|row| row.len() != t) {
            return Err(Error::dims("numerator coefficient table shape mismatch"));
        }
        for (i, row) in numer_coeffs.iter().enumerate() {
            for (j, coeffs) in row.iter().enumerate() {
                let expected = degrees.numerator_degree(i, j) + 1;
                if coeffs.len() != expected {
                    return Err(Error::dims(format!(
                        "numerator coefficients for entry ({i}, {j}) have length {}, expected {expected}",
                        coeffs.len()
                    )));
                }
            }
        }
        if denom_coeffs.len() != degrees.denominator_degree() + 1 {
            return Err(Error::dims(format!(
                "denominator coefficients have length {}, expected {}",
                denom_coeffs.len(),
                degrees.denominator_degree() + 1
            )));
        }
        if denom_basis.degree() != degrees.denominator_degree()
            || numer_basis.degree() != degrees.max_numerator_degree()
        {
            return Err(Error::dims("basis degrees do not match the degree spec"));
        }
        if (denom_coeffs.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidOptions {
                message: format!(
                    "denominator coefficients have norm {}, expected 1",
                    denom_coeffs.norm()
                ),
            });
        }
        Ok(RationalApproximant {
            degrees,
            denom_coeffs,
            numer_coeffs,
            denom_basis,
            numer_basis,
            fit_weights,
        })
    }

    pub fn degrees(&self) -> &DegreeSpec {
        &self.degrees
    }

    /// Matrix shape `(s, t)`.
    pub fn shape(&self) -> (usize, usize) {
        self.degrees.shape()
    }

    pub fn denom_coeffs(&self) -> &DVector<Complex64> {
        &self.denom_coeffs
    }

    pub fn numer_coeffs(&self) -> &[Vec<DVector<Complex64>>] {
        &self.numer_coeffs
    }

    pub fn denom_basis(&self) -> &ArnoldiBasis {
        &self.denom_basis
    }

    pub fn numer_basis(&self) -> &ArnoldiBasis {
        &self.numer_basis
    }

    /// The node weights of the final bound evaluation (fit provenance).
    pub fn fit_weights(&self) -> &WeightVector {
        &self.fit_weights
    }

    /// Evaluates the approximant at arbitrary nodes by replaying the basis
    /// recurrences. Nodes where the denominator vanishes get explicit
    /// non-finite entries and are listed in the result.
    ///
    /// # Errors
    /// `Breakdown` if a stored recurrence coefficient is unusably small;
    /// `DimensionMismatch` on an empty node list.
    pub fn evaluate(&self, new_nodes: &[Complex64]) -> Result<Evaluation, Error> {
        let (s, t) = self.shape();
        let denom_table = self.denom_basis.evaluate(new_nodes)?;
        let numer_table = self.numer_basis.evaluate(new_nodes)?;
        let denominator_vec = &denom_table * &self.denom_coeffs;
        let m = new_nodes.len();
        let mut values = vec![DMatrix::<Complex64>::zeros(s, t); m];
        for i in 0..s {
            for j in 0..t {
                let nij = self.degrees.numerator_degree(i, j);
                let numerator = numer_table.columns(0, nij + 1) * &self.numer_coeffs[i][j];
                for l in 0..m {
                    values[l][(i, j)] = divide_guarded(numerator[l], denominator_vec[l]);
                }
            }
        }
        let mut vanished_nodes = Vec::new();
        let denominator: Vec<Complex64> = denominator_vec.iter().copied().collect();
        for (l, q) in denominator.iter().enumerate() {
            if q.norm() < DENOMINATOR_GUARD {
                vanished_nodes.push(l);
            }
        }
        Ok(Evaluation {
            values,
            denominator,
            vanished_nodes,
        })
    }

    /// Serializes to a versioned JSON document. The document stores the basis
    /// recurrences and coefficients, not the orthonormal columns, so it stays
    /// small and still evaluates bit-identically to the in-memory fit.
    pub fn to_json(&self) -> String {
        document::write_approximant(self)
    }

    /// Reads a document produced by [`RationalApproximant::to_json`].
    /// Documents from the previous minor schema version are accepted with a
    /// warning.
    ///
    /// # Errors
    /// `MalformedDocument` on parse failures or schema violations.
    pub fn from_json(text: &str) -> Result<LoadedApproximant, Error> {
        document::read_approximant(text)
    }

    /// Diagnoses optimality against samples; see [`diagnose`].
    pub fn diagnose(
        &self,
        samples: &SampleSet,
        dual_value: f64,
        extreme_tol: f64,
    ) -> Result<Diagnostics, Error> {
        diagnose(self, samples, dual_value, extreme_tol)
    }
}

/// Serializes an approximant to its JSON document.
pub fn serialize(approximant: &RationalApproximant) -> String {
    approximant.to_json()
}

/// Parses an approximant document; see [`RationalApproximant::from_json`].
pub fn deserialize(text: &str) -> Result<LoadedApproximant, Error> {
    RationalApproximant::from_json(text)
}

/// Default share of the worst error within which a node counts as extreme.
pub const DEFAULT_EXTREME_TOL: f64 = 1e-3;

/// Measures how close a fit is to minimax on the given samples.
///
/// `dual_value` is the lower bound from the fit's final evaluation. The
/// relative gap certifies optimality; the slackness residual and the extreme
/// point set describe how the fit's weights line up with the worst nodes;
/// `denominator_min_abs` confirms the hypothesis behind the certificate (a
/// denominator that never vanishes on the nodes).
///
/// # Errors
/// `DimensionMismatch` when the samples do not match the fit's shape or node
/// count; `InvalidOptions` for `extreme_tol` outside `(0, 1)` or a negative
/// or non-finite `dual_value`.
pub fn diagnose(
    approximant: &RationalApproximant,
    samples: &SampleSet,
    dual_value: f64,
    extreme_tol: f64,
) -> Result<Diagnostics, Error> {
    if samples.shape() != approximant.shape() {
        return Err(Error::dims(format!(
            "samples are {:?} but the fit is {:?}",
            samples.shape(),
            approximant.shape()
        )));
    }
    if approximant.fit_weights.len() != samples.len() {
        return Err(Error::dims(format!(
            "fit carries {} weights but the sample set has {} nodes",
            approximant.fit_weights.len(),
            samples.len()
        )));
    }
    if !(extreme_tol > 0.0 && extreme_tol < 1.0) {
        return Err(Error::InvalidOptions {
            message: format!("extreme_tol must lie in (0, 1), got {extreme_tol}"),
        });
    }
    if !dual_value.is_finite() || dual_value < 0.0 {
        return Err(Error::InvalidOptions {
            message: format!("dual_value must be finite and >= 0, got {dual_value}"),
        });
    }

    let evaluation = approximant.evaluate(samples.nodes())?;
    let errors = compute_errors(samples, &evaluation.values)?;
    let worst = errors.max_sq_error;
    let relative_gap = if worst < ABSOLUTE_GAP_FLOOR {
        0.0
    } else {
        (worst - dual_value).abs() / worst
    };
    let mut slackness_residual = 0.0f64;
    for (l, fro) in errors.per_node_fro.iter().enumerate() {
        let product = (approximant.fit_weights.get(l) * (worst - fro * fro)).abs();
        slackness_residual = slackness_residual.max(product);
    }
    let threshold = (1.0 - extreme_tol) * worst;
    let extreme_points: Vec<usize> = errors
        .per_node_fro
        .iter()
        .enumerate()
        .filter(|(_, fro)| *fro * *fro >= threshold)
        .map(|(l, _)| l)
        .collect();
    let denominator_min_abs = evaluation
        .denominator
        .iter()
        .map(|q| q.norm())
        .fold(f64::INFINITY, f64::min);

    Ok(Diagnostics {
        relative_gap,
        slackness_residual,
        extreme_points,
        denominator_min_abs,
    })
}
