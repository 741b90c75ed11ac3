//! Slow dense reference implementations used by tests.
//!
//! These build the explicit power-basis matrices that the fast paths avoid,
//! factor them with dense Householder QR, and refuse instances whose explicit
//! basis is too ill-conditioned to trust. They exist to cross-check the
//! recurrence-based code on small instances, not for production use.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Error;
use crate::model::{validate, DegreeSpec, SampleSet, WeightVector};

/// Condition estimate above which the dense paths refuse to answer.
const CONDITION_LIMIT: f64 = 1e12;

/// The dense Hermitian pencil behind the weighted least-squares bound: the
/// bound is the smallest generalized eigenvalue of `(a_matrix, b_matrix)`
/// over vectors with nonzero denominator part.
#[derive(Debug, Clone)]
pub struct DensePencil {
    /// `[-N, FP]^H W_big [-N, FP]` where `N` stacks the per-entry numerator
    /// power bases, `FP` the sample-scaled denominator basis.
    pub a_matrix: DMatrix<Complex64>,
    /// Block diagonal `diag(0, P^H W P)`: only denominator coordinates carry
    /// the normalization.
    pub b_matrix: DMatrix<Complex64>,
}

/// Explicit power basis `[1, x, ..., x^degree]` evaluated at the nodes.
fn vandermonde(nodes: &[Complex64], degree: usize) -> DMatrix<Complex64> {
    let mut v = DMatrix::zeros(nodes.len(), degree + 1);
    for (l, &x) in nodes.iter().enumerate() {
        let mut p = Complex64::new(1.0, 0.0);
        for j in 0..=degree {
            v[(l, j)] = p;
            p *= x;
        }
    }
    v
}

fn scale_rows(matrix: &DMatrix<Complex64>, factors: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(matrix.nrows(), matrix.ncols(), |i, j| {
        factors[i] * matrix[(i, j)]
    })
}

/// Two-norm condition estimate; infinite when the matrix is rank deficient.
fn condition_estimate(matrix: &DMatrix<Complex64>) -> f64 {
    let sv = matrix.clone().svd(false, false).singular_values;
    let largest = sv.iter().copied().fold(0.0, f64::max);
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if smallest <= 0.0 {
        f64::INFINITY
    } else {
        largest / smallest
    }
}

fn guard_condition(matrix: &DMatrix<Complex64>) -> Result<(), Error> {
    let condition = condition_estimate(matrix);
    if condition > CONDITION_LIMIT {
        return Err(Error::IllConditioned { condition });
    }
    Ok(())
}

fn thin_q(matrix: DMatrix<Complex64>) -> DMatrix<Complex64> {
    matrix.qr().q()
}

/// Orthogonal projector onto the span of the weighted explicit power basis,
/// from a dense QR. Limited to `m <= 16`, `degree <= 6`.
///
/// # Errors
/// `IllConditioned` when the explicit basis cannot be trusted;
/// `DimensionMismatch` outside the size limits or on malformed input.
pub fn dense_qr_projector(
    nodes: &[Complex64],
    weights: &[f64],
    degree: usize,
) -> Result<DMatrix<Complex64>, Error> {
    let m = nodes.len();
    if m > 16 || degree > 6 {
        return Err(Error::dims(format!(
            "dense projector is limited to m <= 16 and degree <= 6, got m = {m}, degree = {degree}"
        )));
    }
    if m != weights.len() {
        return Err(Error::dims(format!(
            "{m} nodes but {} weights",
            weights.len()
        )));
    }
    if m < degree + 1 {
        return Err(Error::TooFewSamples {
            available: m,
            required: degree + 1,
        });
    }
    let sqrtw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let weighted = scale_rows(&vandermonde(nodes, degree), &sqrtw);
    guard_condition(&weighted)?;
    let q = thin_q(weighted);
    Ok(&q * q.adjoint())
}

/// Active-set view shared by the dense paths: indices with `w_l > 0`, their
/// nodes, and square roots of their weights.
fn active_view(
    samples: &SampleSet,
    weights: &WeightVector,
) -> (Vec<usize>, Vec<Complex64>, Vec<f64>) {
    let active = weights.active_indices(0.0);
    let nodes: Vec<Complex64> = active.iter().map(|&l| samples.nodes()[l]).collect();
    let sqrtw: Vec<f64> = active.iter().map(|&l| weights.get(l).sqrt()).collect();
    (active, nodes, sqrtw)
}

fn guard_dense_size(samples: &SampleSet, degrees: &DegreeSpec) -> Result<(), Error> {
    let m = samples.len();
    let nu = degrees.max_numerator_degree();
    let d = degrees.denominator_degree();
    if m > 64 || nu > 8 || d > 8 {
        return Err(Error::dims(format!(
            "dense reference is limited to m <= 64 and degrees <= 8, \
             got m = {m}, max numerator degree = {nu}, denominator degree = {d}"
        )));
    }
    Ok(())
}

/// Dense reference value of the weighted least-squares lower bound at `w`.
///
/// Builds the explicit weighted power bases, takes their dense QRs, forms the
/// small Hermitian matrix whose smallest eigenvalue is the bound, and solves
/// it by a dense eigendecomposition. The result is clamped at zero: the
/// matrix is positive semidefinite in exact arithmetic, so tiny negative
/// eigenvalues are rounding.
///
/// # Errors
/// `IllConditioned` when an explicit basis fails the condition guard;
/// `DimensionMismatch` outside the size limits; validation errors as in
/// [`validate`].
pub fn dense_dual(
    samples: &SampleSet,
    degrees: &DegreeSpec,
    weights: &WeightVector,
) -> Result<f64, Error> {
    validate(samples, degrees)?;
    guard_dense_size(samples, degrees)?;
    if weights.len() != samples.len() {
        return Err(Error::dims(format!(
            "{} weights for {} samples",
            weights.len(),
            samples.len()
        )));
    }
    let (active, nodes, sqrtw) = active_view(samples, weights);
    if active.len() < degrees.required_samples() {
        return Err(Error::InfeasibleAfterFiltering {
            active: active.len(),
            required: degrees.required_samples(),
        });
    }
    let (s, t) = samples.shape();
    let d = degrees.denominator_degree();
    let ma = active.len();

    let weighted_phi = scale_rows(&vandermonde(&nodes, d), &sqrtw);
    guard_condition(&weighted_phi)?;
    let q_denom = thin_q(weighted_phi);

    // Q^H diag(sum_ij |f_ij|^2) Q accumulates the sample energy; each block
    // B_ij = P_ij^H diag(f_ij) Q removes (as B^H B) the part of the energy
    // the numerator entry can match.
    let mut energy = vec![0.0f64; ma];
    for (row, &l) in active.iter().enumerate() {
        for i in 0..s {
            for j in 0..t {
                energy[row] += samples.entry(l, i, j).norm_sqr();
            }
        }
    }
    let mut small = DMatrix::<Complex64>::zeros(d + 1, d + 1);
    for a in 0..=d {
        for b in 0..=d {
            let mut acc = Complex64::new(0.0, 0.0);
            for row in 0..ma {
                acc += q_denom[(row, a)].conj() * energy[row] * q_denom[(row, b)];
            }
            small[(a, b)] = acc;
        }
    }
    for j in 0..t {
        for i in 0..s {
            let nij = degrees.numerator_degree(i, j);
            let weighted_psi = scale_rows(&vandermonde(&nodes, nij), &sqrtw);
            guard_condition(&weighted_psi)?;
            let p = thin_q(weighted_psi);
            let scaled = DMatrix::from_fn(ma, d + 1, |row, c| {
                samples.entry(active[row], i, j) * q_denom[(row, c)]
            });
            let block = p.adjoint() * scaled;
            small -= block.adjoint() * block;
        }
    }

    // Hermitize before the eigensolve; the assembly is Hermitian only up to
    // roundoff.
    let herm = (&small + small.adjoint()) * Complex64::new(0.5, 0.0);
    let eigen = herm.symmetric_eigen();
    let smallest = eigen
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(smallest.max(0.0))
}

/// Dense pencil `(A_w, B_w)` of the bound's generalized eigenvalue problem,
/// in explicit power coordinates. Same size limits as [`dense_dual`].
///
/// # Errors
/// As in [`dense_dual`].
pub fn dense_pencil(
    samples: &SampleSet,
    degrees: &DegreeSpec,
    weights: &WeightVector,
) -> Result<DensePencil, Error> {
    validate(samples, degrees)?;
    guard_dense_size(samples, degrees)?;
    if weights.len() != samples.len() {
        return Err(Error::dims(format!(
            "{} weights for {} samples",
            weights.len(),
            samples.len()
        )));
    }
    let (active, nodes, sqrtw) = active_view(samples, weights);
    if active.len() < degrees.required_samples() {
        return Err(Error::InfeasibleAfterFiltering {
            active: active.len(),
            required: degrees.required_samples(),
        });
    }
    let (s, t) = samples.shape();
    let d = degrees.denominator_degree();
    let g = s * t;
    let n = degrees.numerator_dimension();
    let ma = active.len();
    let phi = vandermonde(&nodes, d);

    // Stacked system [-N, FP]: one block row per entry, entries ordered
    // column by column (i fastest).
    let mut stacked = DMatrix::<Complex64>::zeros(g * ma, n + d + 1);
    let mut col = 0usize;
    let mut block = 0usize;
    for j in 0..t {
        for i in 0..s {
            let nij = degrees.numerator_degree(i, j);
            let psi = vandermonde(&nodes, nij);
            for row in 0..ma {
                for c in 0..=nij {
                    stacked[(block * ma + row, col + c)] = -psi[(row, c)];
                }
                let f = samples.entry(active[row], i, j);
                for c in 0..=d {
                    stacked[(block * ma + row, n + c)] = f * phi[(row, c)];
                }
            }
            col += nij + 1;
            block += 1;
        }
    }
    let weights_big: Vec<f64> = (0..g * ma)
        .map(|row| sqrtw[row % ma] * sqrtw[row % ma])
        .collect();
    let mut a_matrix = DMatrix::<Complex64>::zeros(n + d + 1, n + d + 1);
    for a in 0..n + d + 1 {
        for b in 0..n + d + 1 {
            let mut acc = Complex64::new(0.0, 0.0);
            for row in 0..g * ma {
                acc += stacked[(row, a)].conj() * weights_big[row] * stacked[(row, b)];
            }
            a_matrix[(a, b)] = acc;
        }
    }
    let mut b_matrix = DMatrix::<Complex64>::zeros(n + d + 1, n + d + 1);
    for a in 0..=d {
        for b in 0..=d {
            let mut acc = Complex64::new(0.0, 0.0);
            for row in 0..ma {
                acc += phi[(row, a)].conj() * sqrtw[row] * sqrtw[row] * phi[(row, b)];
            }
            b_matrix[(n + a, n + b)] = acc;
        }
    }
    Ok(DensePencil { a_matrix, b_matrix })
}
