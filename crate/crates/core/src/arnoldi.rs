//! Orthonormal polynomial bases on weighted nodes, built by an Arnoldi
//! recurrence instead of an explicit (and ill-conditioned) power basis.
//!
//! `orthogonalize` produces columns spanning `[sqrt(w), X sqrt(w), ...,
//! X^k sqrt(w)]` with `X = diag(nodes)`, together with the Hessenberg
//! recurrence that generated them. The triangular factor of the implied QR
//! is never formed; coefficient vectors live in the orthonormal coordinates,
//! and `evaluate_basis` replays the recurrence at arbitrary new nodes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Error;

/// Orthonormal basis `Q` of the weighted node powers up to `degree`, plus the
/// Hessenberg recurrence `X Q = Q H + breakout * q_next * e_k^T` needed to
/// evaluate the same polynomials anywhere.
#[derive(Debug, Clone)]
pub struct ArnoldiBasis {
    /// Orthonormal columns over the active nodes. Absent on bases restored
    /// from documents, which store only the recurrence.
    q_columns: Option<DMatrix<Complex64>>,
    hessenberg: DMatrix<Complex64>,
    breakout: Complex64,
    weight_norm: f64,
    degree: usize,
    active_nodes: Vec<Complex64>,
}

impl ArnoldiBasis {
    /// Orthonormal columns, if this basis still carries them.
    pub fn q_columns(&self) -> Option<&DMatrix<Complex64>> {
        self.q_columns.as_ref()
    }

    /// The `(degree+1) x (degree+1)` upper-Hessenberg recurrence matrix.
    pub fn hessenberg(&self) -> &DMatrix<Complex64> {
        &self.hessenberg
    }

    /// Coupling to the first basis column beyond `degree`.
    pub fn breakout(&self) -> Complex64 {
        self.breakout
    }

    /// `||sqrt(w)||_2` over the active nodes.
    pub fn weight_norm(&self) -> f64 {
        self.weight_norm
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The (positive-weight) nodes the basis was built on.
    pub fn active_nodes(&self) -> &[Complex64] {
        &self.active_nodes
    }

    pub fn node_count(&self) -> usize {
        self.active_nodes.len()
    }

    /// Reassembles a basis from its serialized recurrence. The orthonormal
    /// columns are not restored; evaluation does not need them.
    pub(crate) fn from_recurrence(
        hessenberg: DMatrix<Complex64>,
        breakout: Complex64,
        weight_norm: f64,
        degree: usize,
        active_nodes: Vec<Complex64>,
    ) -> Self {
        ArnoldiBasis {
            q_columns: None,
            hessenberg,
            breakout,
            weight_norm,
            degree,
            active_nodes,
        }
    }

    /// Evaluates the basis polynomials at new nodes; see [`evaluate_basis`].
    pub fn evaluate(&self, new_nodes: &[Complex64]) -> Result<DMatrix<Complex64>, Error> {
        evaluate_basis(self, new_nodes)
    }
}

/// Subdiagonal magnitudes at or below this are treated as rank deficiency.
fn breakdown_tolerance(nodes: &[Complex64]) -> f64 {
    let scale = nodes.iter().map(|x| x.norm()).fold(0.0, f64::max);
    1e-14 * scale.max(1.0)
}

/// Builds an orthonormal basis of `span([sqrt(w), X sqrt(w), ..., X^degree
/// sqrt(w)])` by modified Gram-Schmidt with one reorthogonalization pass.
///
/// The first column is `sqrt(w) / ||sqrt(w)||`, and successive columns are
/// weighted node polynomials of increasing exact degree.
///
/// # Errors
/// `Breakdown` when a subdiagonal recurrence coefficient falls to the
/// breakdown tolerance (the weighted powers are numerically rank deficient);
/// `TooFewSamples` when fewer than `degree + 1` nodes are supplied;
/// `InvalidWeights` on nonpositive weights; `DimensionMismatch` and
/// `NonFiniteData` on malformed input.
pub fn orthogonalize(
    nodes: &[Complex64],
    weights: &[f64],
    degree: usize,
) -> Result<ArnoldiBasis, Error> {
    let m = nodes.len();
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
    for (l, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w <= 0.0 {
            return Err(Error::InvalidWeights {
                message: format!("weight {l} is {w}; orthogonalization needs weights > 0"),
            });
        }
    }
    for (l, x) in nodes.iter().enumerate() {
        if !x.re.is_finite() || !x.im.is_finite() {
            return Err(Error::NonFiniteData {
                location: format!("node {l}"),
            });
        }
    }

    let tolerance = breakdown_tolerance(nodes);
    let weight_norm = weights.iter().sum::<f64>().sqrt();
    let mut q = DMatrix::<Complex64>::zeros(m, degree + 1);
    for l in 0..m {
        q[(l, 0)] = Complex64::new(weights[l].sqrt() / weight_norm, 0.0);
    }
    let mut h = DMatrix::<Complex64>::zeros(degree + 1, degree + 1);
    let mut breakout = Complex64::new(0.0, 0.0);

    for j in 0..=degree {
        let mut v = DVector::from_fn(m, |l, _| nodes[l] * q[(l, j)]);
        // Two passes of modified Gram-Schmidt; the projection coefficients
        // from both passes accumulate into the same Hessenberg column.
        for _ in 0..2 {
            for i in 0..=j {
                let coeff = q.column(i).dotc(&v);
                h[(i, j)] += coeff;
                v.axpy(-coeff, &q.column(i), Complex64::new(1.0, 0.0));
            }
        }
        let norm = v.norm();
        if j < degree {
            if norm <= tolerance {
                return Err(Error::Breakdown {
                    column: j + 1,
                    magnitude: norm,
                    tolerance,
                });
            }
            h[(j + 1, j)] = Complex64::new(norm, 0.0);
            q.set_column(j + 1, &(v / Complex64::new(norm, 0.0)));
        } else {
            // The coupling past the last kept column. A tiny value here is
            // legal (with m = degree + 1 nodes, Q is square unitary).
            breakout = Complex64::new(norm, 0.0);
        }
    }

    Ok(ArnoldiBasis {
        q_columns: Some(q),
        hessenberg: h,
        breakout,
        weight_norm,
        degree,
        active_nodes: nodes.to_vec(),
    })
}

/// Evaluates the basis polynomials at `new_nodes` by replaying the Hessenberg
/// recurrence, returning the `m_new x (degree+1)` table `L` with `L[:,0]` all
/// ones. Coefficient vectors expressed in the orthonormal coordinates apply
/// unchanged: a polynomial with coordinate vector `c` takes the values `L c`.
///
/// # Errors
/// `Breakdown` when a stored subdiagonal coefficient is too small to divide
/// by; `DimensionMismatch` on an empty node list; `NonFiniteData` on NaN or
/// infinite nodes.
pub fn evaluate_basis(
    basis: &ArnoldiBasis,
    new_nodes: &[Complex64],
) -> Result<DMatrix<Complex64>, Error> {
    if new_nodes.is_empty() {
        return Err(Error::dims("evaluation needs at least one node"));
    }
    for (l, y) in new_nodes.iter().enumerate() {
        if !y.re.is_finite() || !y.im.is_finite() {
            return Err(Error::NonFiniteData {
                location: format!("evaluation node {l}"),
            });
        }
    }
    let m = new_nodes.len();
    let k = basis.degree;
    let tolerance = breakdown_tolerance(&basis.active_nodes);
    let mut table = DMatrix::<Complex64>::zeros(m, k + 1);
    for l in 0..m {
        table[(l, 0)] = Complex64::new(1.0, 0.0);
    }
    for j in 0..k {
        let sub = basis.hessenberg[(j + 1, j)];
        if sub.norm() <= tolerance {
            return Err(Error::Breakdown {
                column: j + 1,
                magnitude: sub.norm(),
                tolerance,
            });
        }
        for l in 0..m {
            let mut v = new_nodes[l] * table[(l, j)];
            for i in 0..=j {
                v -= basis.hessenberg[(i, j)] * table[(l, i)];
            }
            table[(l, j + 1)] = v / sub;
        }
    }
    Ok(table)
}
