//! Cross-checks of the recurrence-based fast paths against the dense
//! reference implementations, on instances small enough for the references
//! to be trustworthy.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use ratfit::arnoldi::{evaluate_basis, orthogonalize};
use ratfit::oracle::{dense_dual, dense_pencil, dense_qr_projector};
use ratfit::{evaluate_dual, DegreeSpec, SampleSet, WeightVector};

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * 2f64.powi(-53)
}

fn complex_in_box(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(2.0 * uniform(rng) - 1.0, 2.0 * uniform(rng) - 1.0)
}

struct Instance {
    samples: SampleSet,
    degrees: DegreeSpec,
    weights: WeightVector,
}

/// Random instance inside the dense-path guards: m <= 12, s,t <= 2,
/// numerator degrees <= 3, denominator degree <= 3, interior weights.
fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let s = 1 + (rng.next_u64() % 2) as usize;
    let t = 1 + (rng.next_u64() % 2) as usize;
    let numer: Vec<Vec<usize>> = (0..s)
        .map(|_| (0..t).map(|_| (rng.next_u64() % 4) as usize).collect())
        .collect();
    let d = (rng.next_u64() % 4) as usize;
    let degrees = DegreeSpec::new(numer, d).unwrap();
    let required = degrees.required_samples();
    let m = required + (rng.next_u64() as usize % (13 - required));
    let nodes: Vec<Complex64> = (0..m).map(|_| complex_in_box(rng)).collect();
    let values: Vec<DMatrix<Complex64>> = (0..m)
        .map(|_| DMatrix::from_fn(s, t, |_, _| complex_in_box(rng)))
        .collect();
    let samples = SampleSet::new(nodes, values).unwrap();
    let weights = WeightVector::normalized((0..m).map(|_| 0.1 + uniform(rng)).collect()).unwrap();
    Instance {
        samples,
        degrees,
        weights,
    }
}

#[test]
fn fast_bound_matches_dense_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for trial in 0..60 {
        let inst = random_instance(&mut rng);
        let dense = match dense_dual(&inst.samples, &inst.degrees, &inst.weights) {
            Ok(v) => v,
            Err(e) => panic!("trial {trial}: dense path refused: {e}"),
        };
        let fast = evaluate_dual(&inst.samples, &inst.degrees, &inst.weights, 0.0)
            .unwrap()
            .dual_value;
        let tol = 1e-10 * dense.max(1.0);
        assert!(
            (fast - dense).abs() <= tol,
            "trial {trial}: fast {fast} vs dense {dense}"
        );
    }
}

#[test]
fn bound_matches_generalized_eigenvalue_reduction() {
    // Independent route: eliminate the numerator coordinates from the dense
    // pencil by a Schur complement and solve the reduced generalized
    // eigenvalue problem on the denominator block.
    let mut rng = ChaCha8Rng::seed_from_u64(137);
    let mut checked = 0;
    for _ in 0..30 {
        let inst = random_instance(&mut rng);
        let pencil = dense_pencil(&inst.samples, &inst.degrees, &inst.weights).unwrap();
        let n = inst.degrees.numerator_dimension();
        let k = inst.degrees.denominator_degree() + 1;
        let a11 = pencil.a_matrix.view((0, 0), (n, n)).into_owned();
        let a12 = pencil.a_matrix.view((0, n), (n, k)).into_owned();
        let a21 = pencil.a_matrix.view((n, 0), (k, n)).into_owned();
        let a22 = pencil.a_matrix.view((n, n), (k, k)).into_owned();
        let b22 = pencil.b_matrix.view((n, n), (k, k)).into_owned();

        let (Some(a11_chol), Some(b22_chol)) = (a11.cholesky(), b22.cholesky()) else {
            continue; // too ill-conditioned for this route; skip
        };
        let schur = &a22 - a21 * a11_chol.solve(&a12);
        let l = b22_chol.l();
        let Some(y) = l.solve_lower_triangular(&schur) else {
            continue;
        };
        let Some(reduced) = l.solve_lower_triangular(&y.adjoint()) else {
            continue;
        };
        let reduced = reduced.adjoint();
        let herm = (&reduced + reduced.adjoint()) * Complex64::new(0.5, 0.0);
        let smallest = herm
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
            .max(0.0);

        let dense = dense_dual(&inst.samples, &inst.degrees, &inst.weights).unwrap();
        assert!(
            (smallest - dense).abs() <= 1e-8 * dense.max(1.0),
            "eigenvalue route {smallest} vs dense bound {dense}"
        );
        checked += 1;
    }
    assert!(
        checked >= 20,
        "only {checked} instances were well-conditioned"
    );
}

#[test]
fn reported_bound_is_the_constrained_minimum() {
    // The bound claims to be the minimum weighted objective over all
    // coefficient pairs with unit weighted denominator norm; random feasible
    // pairs in explicit power coordinates must never beat it.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let inst = random_instance(&mut rng);
    let eval = evaluate_dual(&inst.samples, &inst.degrees, &inst.weights, 0.0).unwrap();
    let (s, t) = inst.samples.shape();
    let m = inst.samples.len();
    let d = inst.degrees.denominator_degree();

    let horner = |coeffs: &[Complex64], x: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };

    for _ in 0..200 {
        let denom: Vec<Complex64> = (0..=d).map(|_| complex_in_box(&mut rng)).collect();
        let mut denom_values: Vec<Complex64> = inst
            .samples
            .nodes()
            .iter()
            .map(|&x| horner(&denom, x))
            .collect();
        let weighted_norm: f64 = (0..m)
            .map(|l| inst.weights.get(l) * denom_values[l].norm_sqr())
            .sum();
        if weighted_norm < 1e-12 {
            continue;
        }
        let scale = weighted_norm.sqrt();
        for v in &mut denom_values {
            *v /= scale;
        }
        let mut objective = 0.0;
        for i in 0..s {
            for j in 0..t {
                let nij = inst.degrees.numerator_degree(i, j);
                let numer: Vec<Complex64> = (0..=nij).map(|_| complex_in_box(&mut rng)).collect();
                for (l, &qv) in denom_values.iter().enumerate() {
                    let p = horner(&numer, inst.samples.nodes()[l]);
                    let r = inst.samples.entry(l, i, j) * qv - p;
                    objective += inst.weights.get(l) * r.norm_sqr();
                }
            }
        }
        assert!(
            objective >= eval.dual_value - 1e-10,
            "random feasible pair reached {objective}, below the bound {}",
            eval.dual_value
        );
    }
}

#[test]
fn recurrence_projector_matches_dense_projector() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let m = 7 + (rng.next_u64() % 6) as usize;
        let degree = (rng.next_u64() % 6) as usize;
        let nodes: Vec<Complex64> = (0..m).map(|_| complex_in_box(&mut rng)).collect();
        let weights: Vec<f64> = (0..m).map(|_| 0.1 + uniform(&mut rng)).collect();
        let dense = match dense_qr_projector(&nodes, &weights, degree) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let basis = orthogonalize(&nodes, &weights, degree).unwrap();
        let q = basis.q_columns().unwrap();
        let fast = q * q.adjoint();
        let deviation = (&fast - &dense)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!(deviation < 1e-10, "projectors differ by {deviation}");
    }
}

#[test]
fn basis_evaluation_agrees_with_interpolation() {
    // A coefficient vector in the orthonormal coordinates describes a
    // polynomial of degree <= k. Interpolating its scaled node values on any
    // k+1 of the sample nodes by a dense power-basis solve must give the same
    // values at fresh nodes.
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let m = 8 + (rng.next_u64() % 5) as usize;
        let k = 1 + (rng.next_u64() % 5) as usize;
        let nodes: Vec<Complex64> = (0..m).map(|_| complex_in_box(&mut rng)).collect();
        let masses: Vec<f64> = (0..m).map(|_| 0.2 + uniform(&mut rng)).collect();
        let total: f64 = masses.iter().sum();
        let weights: Vec<f64> = masses.iter().map(|w| w / total).collect();
        let basis = orthogonalize(&nodes, &weights, k).unwrap();
        let q = basis.q_columns().unwrap();
        let coeffs = DVector::from_fn(k + 1, |_, _| complex_in_box(&mut rng));

        // Scaled node values of the polynomial (simplex weights make the
        // scaling exactly 1/sqrt(w)).
        let at_nodes = q * &coeffs;
        let scaled: Vec<Complex64> = (0..m)
            .map(|l| at_nodes[l] / Complex64::new(weights[l].sqrt(), 0.0))
            .collect();

        // Dense interpolation through the first k+1 nodes.
        let vand = DMatrix::from_fn(k + 1, k + 1, |i, j| nodes[i].powu(j as u32));
        let rhs = DVector::from_fn(k + 1, |i, _| scaled[i]);
        let Some(mono) = vand.lu().solve(&rhs) else {
            continue;
        };

        let fresh: Vec<Complex64> = (0..5).map(|_| complex_in_box(&mut rng)).collect();
        let table = evaluate_basis(&basis, &fresh).unwrap();
        let via_basis = table * &coeffs;
        for (l, &y) in fresh.iter().enumerate() {
            let mut direct = Complex64::new(0.0, 0.0);
            for j in (0..=k).rev() {
                direct = direct * y + mono[j];
            }
            let err = (via_basis[l] - direct).norm();
            assert!(
                err < 1e-7,
                "fresh node {l}: basis {} vs interpolant {direct}",
                via_basis[l]
            );
        }
    }
}
