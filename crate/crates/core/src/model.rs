//! Domain types: sampled matrix data, degree requests, simplex weights, and
//! error summaries.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Error;

/// Samples of a matrix-valued function: distinct complex nodes `x_l` and the
/// sampled `s x t` matrices `F(x_l)`.
#[derive(Debug, Clone)]
pub struct SampleSet {
    nodes: Vec<Complex64>,
    values: Vec<DMatrix<Complex64>>,
}

impl SampleSet {
    /// Builds a sample set, checking node distinctness, finiteness, and that
    /// every value matrix has the same shape.
    ///
    /// # Errors
    /// `DuplicateNodes`, `DimensionMismatch`, or `NonFiniteData`.
    pub fn new(nodes: Vec<Complex64>, values: Vec<DMatrix<Complex64>>) -> Result<Self, Error> {
        if nodes.is_empty() {
            return Err(Error::dims("a sample set needs at least one node"));
        }
        if nodes.len() != values.len() {
            return Err(Error::dims(format!(
                "{} nodes but {} value matrices",
                nodes.len(),
                values.len()
            )));
        }
        for (l, x) in nodes.iter().enumerate() {
            if !x.re.is_finite() || !x.im.is_finite() {
                return Err(Error::NonFiniteData {
                    location: format!("node {l}"),
                });
            }
        }
        let (s, t) = values[0].shape();
        if s == 0 || t == 0 {
            return Err(Error::dims("value matrices must be at least 1 x 1"));
        }
        for (l, f) in values.iter().enumerate() {
            if f.shape() != (s, t) {
                return Err(Error::dims(format!(
                    "value matrix {l} is {:?}, expected {:?}",
                    f.shape(),
                    (s, t)
                )));
            }
            for (idx, v) in f.iter().enumerate() {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFiniteData {
                        location: format!("value matrix {l}, entry {}", idx),
                    });
                }
            }
        }
        find_duplicate(&nodes)?;
        Ok(SampleSet { nodes, values })
    }

    /// Number of samples `m`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Matrix shape `(s, t)` common to all samples.
    pub fn shape(&self) -> (usize, usize) {
        self.values[0].shape()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn values(&self) -> &[DMatrix<Complex64>] {
        &self.values
    }

    /// Sampled entry `f_ij(x_l)`.
    pub fn entry(&self, l: usize, i: usize, j: usize) -> Complex64 {
        self.values[l][(i, j)]
    }
}

/// Rejects exactly equal nodes. Equality is exact comparison of both real
/// components; near-duplicates are legal here and surface later as basis
/// breakdown, since blurring them would silently change the problem.
pub(crate) fn find_duplicate(nodes: &[Complex64]) -> Result<(), Error> {
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| {
        nodes[a]
            .re
            .total_cmp(&nodes[b].re)
            .then(nodes[a].im.total_cmp(&nodes[b].im))
    });
    for pair in order.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if nodes[a].re == nodes[b].re && nodes[a].im == nodes[b].im {
            return Err(Error::DuplicateNodes {
                first: a.min(b),
                second: a.max(b),
            });
        }
    }
    Ok(())
}

/// Requested numerator degrees `n_ij` (one per matrix entry) and the degree
/// `d` of the shared scalar denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSpec {
    numerator_degrees: Vec<Vec<usize>>,
    denominator_degree: usize,
}

impl DegreeSpec {
    /// Builds a degree spec from per-entry numerator degrees (rows of equal
    /// length) and the shared denominator degree.
    pub fn new(
        numerator_degrees: Vec<Vec<usize>>,
        denominator_degree: usize,
    ) -> Result<Self, Error> {
        if numerator_degrees.is_empty() || numerator_degrees[0].is_empty() {
            return Err(Error::dims("numerator degree table must be at least 1 x 1"));
        }
        let t = numerator_degrees[0].len();
        if numerator_degrees.iter().any(|row| row.len() != t) {
            return Err(Error::dims("numerator degree rows have unequal lengths"));
        }
        Ok(DegreeSpec {
            numerator_degrees,
            denominator_degree,
        })
    }

    /// All numerator entries share one degree.
    pub fn uniform(
        rows: usize,
        cols: usize,
        numerator_degree: usize,
        denominator_degree: usize,
    ) -> Result<Self, Error> {
        if rows == 0 || cols == 0 {
            return Err(Error::dims("degree table must be at least 1 x 1"));
        }
        Ok(DegreeSpec {
            numerator_degrees: vec![vec![numerator_degree; cols]; rows],
            denominator_degree,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (
            self.numerator_degrees.len(),
            self.numerator_degrees[0].len(),
        )
    }

    pub fn numerator_degree(&self, i: usize, j: usize) -> usize {
        self.numerator_degrees[i][j]
    }

    pub fn numerator_degrees(&self) -> &[Vec<usize>] {
        &self.numerator_degrees
    }

    pub fn denominator_degree(&self) -> usize {
        self.denominator_degree
    }

    /// Largest numerator degree over all entries.
    pub fn max_numerator_degree(&self) -> usize {
        *self
            .numerator_degrees
            .iter()
            .flatten()
            .max()
            .expect("degree table is nonempty")
    }

    /// Number of matrix entries `s * t`.
    pub fn entry_count(&self) -> usize {
        let (s, t) = self.shape();
        s * t
    }

    /// Total numerator coefficient count: sum of `n_ij + 1`.
    pub fn numerator_dimension(&self) -> usize {
        self.numerator_degrees.iter().flatten().map(|n| n + 1).sum()
    }

    /// Minimum sample count for a well-posed fit: `max_ij(n_ij) + d + 2`.
    pub fn required_samples(&self) -> usize {
        self.max_numerator_degree() + self.denominator_degree + 2
    }
}

/// Nonnegative node weights summing to one (a point on the probability
/// simplex). The dual variable of the fit.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    entries: Vec<f64>,
}

/// Allowed deviation of a weight sum from one.
const SIMPLEX_TOL: f64 = 1e-12;

impl WeightVector {
    /// Wraps weights that already lie on the simplex.
    ///
    /// # Errors
    /// `InvalidWeights` if any entry is negative or non-finite, or if the sum
    /// deviates from one by more than 1e-12.
    pub fn new(entries: Vec<f64>) -> Result<Self, Error> {
        if entries.is_empty() {
            return Err(Error::InvalidWeights {
                message: "weight vector must be nonempty".into(),
            });
        }
        for (l, &w) in entries.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeights {
                    message: format!("entry {l} is {w}; weights must be finite and >= 0"),
                });
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidWeights {
                message: format!("entries sum to {sum}, expected 1 within {SIMPLEX_TOL:e}"),
            });
        }
        Ok(WeightVector { entries })
    }

    /// Uniform weights `1/m`.
    pub fn uniform(m: usize) -> Result<Self, Error> {
        if m == 0 {
            return Err(Error::InvalidWeights {
                message: "weight vector must be nonempty".into(),
            });
        }
        Ok(WeightVector {
            entries: vec![1.0 / m as f64; m],
        })
    }

    /// Scales nonnegative masses onto the simplex.
    ///
    /// # Errors
    /// `AllMassVanished` if the masses sum to zero; `InvalidWeights` on
    /// negative or non-finite input.
    pub fn normalized(masses: Vec<f64>) -> Result<Self, Error> {
        for (l, &w) in masses.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeights {
                    message: format!("mass {l} is {w}; masses must be finite and >= 0"),
                });
            }
        }
        let sum: f64 = masses.iter().sum();
        if sum <= 0.0 || !sum.is_finite() {
            return Err(Error::AllMassVanished);
        }
        Ok(WeightVector {
            entries: masses.into_iter().map(|w| w / sum).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, l: usize) -> f64 {
        self.entries[l]
    }

    /// Indices with weight strictly above `floor`.
    pub fn active_indices(&self, floor: f64) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&l| self.entries[l] > floor)
            .collect()
    }
}

/// Deviation summary of approximant values against a sample set.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    /// Frobenius norm of the residual matrix at each node (not squared).
    pub per_node_fro: Vec<f64>,
    /// Entrywise residual magnitudes `|f_ij - r_ij|` at each node.
    pub per_entry: Vec<DMatrix<f64>>,
    /// `sqrt(mean of squared per-node Frobenius norms)`.
    pub rmse: f64,
    /// Worst squared per-node Frobenius norm. Kept squared; callers take the
    /// square root only for display.
    pub max_sq_error: f64,
}

/// Checks that a sample set can support the requested degrees.
///
/// # Errors
/// `DimensionMismatch` if the degree table shape differs from the sample
/// shape, `DuplicateNodes` on repeated nodes, and `TooFewSamples` when
/// `m < max_ij(n_ij) + d + 2`.
pub fn validate(samples: &SampleSet, degrees: &DegreeSpec) -> Result<(), Error> {
    if samples.shape() != degrees.shape() {
        return Err(Error::dims(format!(
            "samples are {:?} but degree table is {:?}",
            samples.shape(),
            degrees.shape()
        )));
    }
    find_duplicate(samples.nodes())?;
    let required = degrees.required_samples();
    if samples.len() < required {
        return Err(Error::TooFewSamples {
            available: samples.len(),
            required,
        });
    }
    Ok(())
}

/// Compares approximant values against the samples node by node.
///
/// # Errors
/// `DimensionMismatch` if lengths or matrix shapes disagree.
pub fn compute_errors(
    samples: &SampleSet,
    approximant_values: &[DMatrix<Complex64>],
) -> Result<ErrorReport, Error> {
    if approximant_values.len() != samples.len() {
        return Err(Error::dims(format!(
            "{} approximant value matrices for {} samples",
            approximant_values.len(),
            samples.len()
        )));
    }
    let shape = samples.shape();
    let mut per_node_fro = Vec::with_capacity(samples.len());
    let mut per_entry = Vec::with_capacity(samples.len());
    for (f, r) in samples.values().iter().zip(approximant_values) {
        if r.shape() != shape {
            return Err(Error::dims(format!(
                "approximant value matrix is {:?}, expected {:?}",
                r.shape(),
                shape
            )));
        }
        let entry = DMatrix::from_fn(shape.0, shape.1, |i, j| (f[(i, j)] - r[(i, j)]).norm());
        let sq: f64 = entry.iter().map(|e| e * e).sum();
        per_node_fro.push(sq.sqrt());
        per_entry.push(entry);
    }
    let mean_sq = per_node_fro.iter().map(|e| e * e).sum::<f64>() / samples.len() as f64;
    let max_sq_error = per_node_fro.iter().map(|e| e * e).fold(0.0, f64::max);
    Ok(ErrorReport {
        per_node_fro,
        per_entry,
        rmse: mean_sq.sqrt(),
        max_sq_error,
    })
}
