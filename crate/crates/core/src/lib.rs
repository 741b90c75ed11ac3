//! Minimax rational fitting of matrix-valued samples.
//!
//! Given samples `F(x_1), ..., F(x_m)` of an `s x t` matrix-valued function at
//! distinct complex nodes, this crate fits a rational approximant `R = P / q`
//! in which every numerator entry `p_ij` is a polynomial of prescribed degree
//! and all entries share one scalar denominator `q`. The fit minimizes the
//! worst squared Frobenius deviation `max_l ||F(x_l) - R(x_l)||_F^2` over the
//! nodes.
//!
//! The solver iteratively reweights the nodes ([`solve`]): at each step a
//! weighted least-squares subproblem is reduced, via orthonormal bases built
//! by a Krylov recurrence ([`ArnoldiBasis`]), to a small singular value
//! problem ([`evaluate_dual`]). Its optimal value is a certified lower bound
//! on the attainable deviation, so the gap between the bound and the achieved
//! error tells how far the iterate is from minimax; the weight update
//! concentrates mass on the worst nodes until the gap closes.
//!
//! ```
//! use ratfit::{solve, DegreeSpec, SampleSet, SolverOptions};
//! use nalgebra::DMatrix;
//! use num_complex::Complex64;
//!
//! // Samples of the scalar function f(x) = 1 / (x + 2) at five nodes.
//! let nodes: Vec<Complex64> = (0..5).map(|l| Complex64::new(l as f64, 1.0)).collect();
//! let values = nodes
//!     .iter()
//!     .map(|&x| DMatrix::from_element(1, 1, 1.0 / (x + 2.0)))
//!     .collect();
//! let samples = SampleSet::new(nodes, values).unwrap();
//! let degrees = DegreeSpec::uniform(1, 1, 1, 1).unwrap();
//!
//! let (fit, report) = solve(&samples, &degrees, &SolverOptions::default()).unwrap();
//! assert!(report.iterations.last().unwrap().max_sq_error < 1e-18);
//! let at_origin = fit.evaluate(&[Complex64::new(0.0, 0.0)]).unwrap();
//! assert!((at_origin.values[0][(0, 0)] - 0.5).norm() < 1e-8);
//! ```

pub mod approximant;
pub mod arnoldi;
mod document;
pub mod dual;
mod error;
pub mod json;
pub mod lawson;
pub mod model;
pub mod oracle;

pub use approximant::{
    deserialize, diagnose, serialize, Diagnostics, Evaluation, LoadedApproximant,
    RationalApproximant, DEFAULT_EXTREME_TOL,
};
pub use arnoldi::{evaluate_basis, orthogonalize, ArnoldiBasis};
pub use dual::{evaluate_dual, DualEvaluation};
pub use error::Error;
pub use lawson::{solve, update_weights, IterationRecord, SolveReport, SolverOptions, Termination};
pub use model::{compute_errors, validate, DegreeSpec, ErrorReport, SampleSet, WeightVector};
