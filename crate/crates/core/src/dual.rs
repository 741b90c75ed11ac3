//! Evaluation of the weighted lower bound and its minimizing coefficients.
//!
//! At a fixed weight vector the minimax problem relaxes to a weighted least
//! squares problem over numerator and denominator coefficients, constrained
//! to unit weighted denominator norm. Its optimal value is a lower bound on
//! the worst-case squared error for ANY approximant of the same type (weak
//! duality), which is what makes the solver's gap a certificate. This module
//! computes the bound as the squared smallest singular value of a small
//! projected matrix assembled in the orthonormal node bases.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::arnoldi::{evaluate_basis, orthogonalize, ArnoldiBasis};
use crate::error::Error;
use crate::model::{validate, DegreeSpec, SampleSet, WeightVector};

/// Denominator magnitudes below this mark the node's rational value as
/// non-finite instead of aborting.
pub(crate) const DENOMINATOR_GUARD: f64 = 1e-300;

/// Relative separation of the two smallest singular values under which the
/// minimizer is flagged as numerically non-unique.
const MULTIPLICITY_TOL: f64 = 1e-12;

/// Result of one bound evaluation: the bound itself, the minimizing
/// coefficients in orthonormal coordinates, and the rational values they
/// induce at every sample node.
#[derive(Debug, Clone)]
pub struct DualEvaluation {
    /// The weighted least-squares lower bound at the given weights.
    pub dual_value: f64,
    /// Denominator coordinates (unit 2-norm right singular vector).
    pub denom_coeffs: DVector<Complex64>,
    /// Numerator coordinates per entry, indexed `[i][j]`, length `n_ij + 1`.
    pub numer_coeffs: Vec<Vec<DVector<Complex64>>>,
    /// Denominator values at the active nodes.
    pub denom_at_nodes: DVector<Complex64>,
    /// Rational values at every sample node, active or not.
    pub rational_at_nodes: Vec<DMatrix<Complex64>>,
    /// Basis of denominator polynomials (degree `d`) on the active nodes.
    pub denom_basis: ArnoldiBasis,
    /// Basis of numerator polynomials (degree `max_ij n_ij`).
    pub numer_basis: ArnoldiBasis,
    /// Indices of the nodes that entered the bases (`w_l > floor`).
    pub active_indices: Vec<usize>,
    /// Set when the two smallest singular values were too close to separate;
    /// the reported minimizer is then one valid choice among several.
    pub multiplicity_warning: bool,
    /// Nodes where the denominator fell below the guard; their rational
    /// values are non-finite.
    pub denominator_vanished: Vec<usize>,
}

/// Evaluates the lower bound at `weights`, treating nodes with weight at or
/// below `weight_floor` as inactive. Inactive nodes still receive rational
/// values, via the basis recurrence.
///
/// # Errors
/// `InfeasibleAfterFiltering` when too few nodes stay active for the
/// requested degrees; `Breakdown` from the basis construction; validation
/// errors as in [`validate`].
pub fn evaluate_dual(
    samples: &SampleSet,
    degrees: &DegreeSpec,
    weights: &WeightVector,
    weight_floor: f64,
) -> Result<DualEvaluation, Error> {
    validate(samples, degrees)?;
    if weights.len() != samples.len() {
        return Err(Error::dims(format!(
            "{} weights for {} samples",
            weights.len(),
            samples.len()
        )));
    }
    if !weight_floor.is_finite() || weight_floor < 0.0 {
        return Err(Error::InvalidOptions {
            message: format!("weight floor must be finite and >= 0, got {weight_floor}"),
        });
    }

    let active = weights.active_indices(weight_floor);
    let required = degrees.required_samples();
    if active.len() < required {
        return Err(Error::InfeasibleAfterFiltering {
            active: active.len(),
            required,
        });
    }

    let (s, t) = samples.shape();
    let d = degrees.denominator_degree();
    let nu = degrees.max_numerator_degree();
    let ma = active.len();
    let active_nodes: Vec<Complex64> = active.iter().map(|&l| samples.nodes()[l]).collect();
    let active_weights: Vec<f64> = active.iter().map(|&l| weights.get(l)).collect();

    let denom_basis = orthogonalize(&active_nodes, &active_weights, d)?;
    let numer_basis = orthogonalize(&active_nodes, &active_weights, nu)?;
    let q_denom = denom_basis
        .q_columns()
        .expect("fresh basis carries columns");
    let q_numer = numer_basis
        .q_columns()
        .expect("fresh basis carries columns");

    // Stack one block per entry (column by column, i fastest): the part of
    // diag(f_ij) Q_denom that the entry's numerator space cannot absorb.
    let g = s * t;
    let mut stacked = DMatrix::<Complex64>::zeros(g * ma, d + 1);
    for j in 0..t {
        for i in 0..s {
            let nij = degrees.numerator_degree(i, j);
            let p = q_numer.columns(0, nij + 1);
            let mut block = DMatrix::from_fn(ma, d + 1, |row, c| {
                samples.entry(active[row], i, j) * q_denom[(row, c)]
            });
            let projected = p * (p.adjoint() * &block);
            block -= projected;
            let b = j * s + i;
            stacked.view_mut((b * ma, 0), (ma, d + 1)).copy_from(&block);
        }
    }

    let svd = stacked.svd(false, true);
    let singular = &svd.singular_values;
    let v_t = svd.v_t.as_ref().expect("SVD was asked for right vectors");
    let mut min_index = 0usize;
    for idx in 1..singular.len() {
        if singular[idx] < singular[min_index] {
            min_index = idx;
        }
    }
    let sigma_min = singular[min_index];
    let multiplicity_warning = if singular.len() > 1 {
        let mut sorted: Vec<f64> = singular.iter().copied().collect();
        sorted.sort_by(f64::total_cmp);
        sorted[1] - sorted[0] <= MULTIPLICITY_TOL * sorted[1].max(f64::MIN_POSITIVE)
    } else {
        false
    };
    let denom_coeffs: DVector<Complex64> = v_t.row(min_index).adjoint();
    let dual_value = sigma_min * sigma_min;

    // Denominator and numerator values at the active nodes.
    let weighted_denom = q_denom * &denom_coeffs;
    let denom_at_nodes = DVector::from_fn(ma, |row, _| {
        weighted_denom[row] / Complex64::new(active_weights[row].sqrt(), 0.0)
    });
    let mut numer_coeffs = vec![Vec::with_capacity(t); s];
    let mut numer_at_active = vec![vec![DVector::<Complex64>::zeros(0); t]; s];
    for (i, value_row) in numer_at_active.iter_mut().enumerate() {
        for (j, value_slot) in value_row.iter_mut().enumerate() {
            let nij = degrees.numerator_degree(i, j);
            let p = q_numer.columns(0, nij + 1);
            let scaled = DVector::from_fn(ma, |row, _| {
                samples.entry(active[row], i, j) * weighted_denom[row]
            });
            let coeffs = p.adjoint() * scaled;
            let weighted_numer = p * &coeffs;
            *value_slot = DVector::from_fn(ma, |row, _| {
                weighted_numer[row] / Complex64::new(active_weights[row].sqrt(), 0.0)
            });
            numer_coeffs[i].push(coeffs);
        }
    }

    // Rational values everywhere: division at active nodes, recurrence
    // evaluation at filtered ones.
    let m = samples.len();
    let mut rational = vec![DMatrix::<Complex64>::zeros(s, t); m];
    let mut vanished = Vec::new();
    for (row, &l) in active.iter().enumerate() {
        let q = denom_at_nodes[row];
        if q.norm() < DENOMINATOR_GUARD {
            vanished.push(l);
        }
        for i in 0..s {
            for j in 0..t {
                rational[l][(i, j)] = divide_guarded(numer_at_active[i][j][row], q);
            }
        }
    }
    let filtered: Vec<usize> = {
        let mut mask = vec![true; m];
        for &l in &active {
            mask[l] = false;
        }
        (0..m).filter(|&l| mask[l]).collect()
    };
    if !filtered.is_empty() {
        let filtered_nodes: Vec<Complex64> = filtered.iter().map(|&l| samples.nodes()[l]).collect();
        let denom_table = evaluate_basis(&denom_basis, &filtered_nodes)?;
        let numer_table = evaluate_basis(&numer_basis, &filtered_nodes)?;
        let denom_values = &denom_table * &denom_coeffs;
        for i in 0..s {
            for j in 0..t {
                let nij = degrees.numerator_degree(i, j);
                let numer_values = numer_table.columns(0, nij + 1) * &numer_coeffs[i][j];
                for (row, &l) in filtered.iter().enumerate() {
                    rational[l][(i, j)] = divide_guarded(numer_values[row], denom_values[row]);
                }
            }
        }
        for (row, &l) in filtered.iter().enumerate() {
            if denom_values[row].norm() < DENOMINATOR_GUARD {
                vanished.push(l);
            }
        }
    }
    vanished.sort_unstable();

    Ok(DualEvaluation {
        dual_value,
        denom_coeffs,
        numer_coeffs,
        denom_at_nodes,
        rational_at_nodes: rational,
        denom_basis,
        numer_basis,
        active_indices: active,
        multiplicity_warning,
        denominator_vanished: vanished,
    })
}

/// Division with the denominator guard: a vanishing denominator yields an
/// explicit non-finite marker rather than NaN noise.
pub(crate) fn divide_guarded(numer: Complex64, denom: Complex64) -> Complex64 {
    if denom.norm() < DENOMINATOR_GUARD {
        Complex64::new(f64::INFINITY, f64::INFINITY)
    } else {
        numer / denom
    }
}
