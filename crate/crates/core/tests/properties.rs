//! Randomized invariants of the building blocks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use ratfit::arnoldi::orthogonalize;
use ratfit::{
    compute_errors, evaluate_dual, update_weights, DegreeSpec, Error, SampleSet, WeightVector,
};

/// Distinct, well-separated nodes from an integer grid.
fn grid_nodes() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::hash_set((-40i32..=40, -40i32..=40), 4..=20).prop_map(|points| {
        points
            .into_iter()
            .map(|(re, im)| Complex64::new(f64::from(re) / 20.0, f64::from(im) / 20.0))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weight_update_stays_on_the_simplex(
        pairs in prop::collection::vec((1e-6f64..1.0, 0.0f64..10.0), 2..30),
        exponent in 0.05f64..=1.0,
    ) {
        let (masses, errors): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let weights = WeightVector::normalized(masses).unwrap();
        match update_weights(&weights, &errors, exponent) {
            Ok(updated) => {
                let sum: f64 = updated.entries().iter().sum();
                prop_assert!((sum - 1.0).abs() <= 1e-12, "sum drifted to {sum}");
                for (&mass, &err) in updated.entries().iter().zip(&errors) {
                    prop_assert!(mass >= 0.0);
                    if err == 0.0 {
                        prop_assert_eq!(mass, 0.0, "zero-error node kept mass");
                    }
                }
            }
            Err(Error::AllMassVanished) => {
                prop_assert!(errors.iter().all(|&e| e == 0.0));
            }
            Err(other) => return Err(TestCaseError::fail(format!("unexpected error: {other}"))),
        }
    }

    #[test]
    fn error_report_is_permutation_equivariant(
        seeds in prop::collection::vec(0u8..=255, 3..12),
    ) {
        let m = seeds.len();
        let nodes: Vec<Complex64> = (0..m)
            .map(|l| Complex64::new(l as f64, f64::from(seeds[l]) / 64.0))
            .collect();
        let values: Vec<DMatrix<Complex64>> = seeds
            .iter()
            .map(|&b| DMatrix::from_fn(2, 1, |i, _| {
                Complex64::new(f64::from(b) / 16.0 + i as f64, -(f64::from(b)) / 32.0)
            }))
            .collect();
        let guesses: Vec<DMatrix<Complex64>> = (0..m)
            .map(|l| DMatrix::from_fn(2, 1, |i, _| {
                Complex64::new(l as f64 / 8.0, i as f64 / 4.0)
            }))
            .collect();
        let samples = SampleSet::new(nodes.clone(), values.clone()).unwrap();
        let report = compute_errors(&samples, &guesses).unwrap();

        let rotation = usize::from(seeds[0]) % m;
        let rotate = |k: usize| (k + rotation) % m;
        let rotated_samples = SampleSet::new(
            (0..m).map(|l| nodes[rotate(l)]).collect(),
            (0..m).map(|l| values[rotate(l)].clone()).collect(),
        )
        .unwrap();
        let rotated_guesses: Vec<DMatrix<Complex64>> =
            (0..m).map(|l| guesses[rotate(l)].clone()).collect();
        let rotated = compute_errors(&rotated_samples, &rotated_guesses).unwrap();

        // Per-node values are computed independently, so they must match
        // bitwise; the mean accumulates in rotated order, so it only matches
        // to roundoff.
        prop_assert!(
            (report.rmse - rotated.rmse).abs() <= 1e-14 * report.rmse.max(1.0),
            "rmse {} vs rotated {}",
            report.rmse,
            rotated.rmse
        );
        prop_assert_eq!(report.max_sq_error.to_bits(), rotated.max_sq_error.to_bits());
        for l in 0..m {
            prop_assert_eq!(
                report.per_node_fro[rotate(l)].to_bits(),
                rotated.per_node_fro[l].to_bits()
            );
        }
    }

    #[test]
    fn orthogonalization_is_orthonormal_and_consistent(
        nodes in grid_nodes(),
        raw_weights in prop::collection::vec(0.05f64..1.0, 20),
        degree in 1usize..=6,
    ) {
        let m = nodes.len();
        prop_assume!(degree + 1 < m);
        let weights: Vec<f64> = raw_weights[..m].to_vec();
        let basis = orthogonalize(&nodes, &weights, degree).unwrap();
        let q = basis.q_columns().unwrap();

        let gram = q.adjoint() * q;
        for i in 0..=degree {
            for j in 0..=degree {
                let expected = if i == j { 1.0 } else { 0.0 };
                let got = gram[(i, j)];
                prop_assert!(
                    (got - Complex64::new(expected, 0.0)).norm() < 1e-12,
                    "gram[({i},{j})] = {got}"
                );
            }
        }

        // The recurrence that generated the columns must reproduce them:
        // X Q_k = Q_{k+1} H (with the breakout residual on the last column).
        let h = basis.hessenberg();
        for j in 0..degree {
            for l in 0..m {
                let mut residual = nodes[l] * q[(l, j)];
                for i in 0..=j + 1 {
                    residual -= h[(i, j)] * q[(l, i)];
                }
                prop_assert!(residual.norm() < 1e-10, "column {j}, row {l}: {residual}");
            }
        }
    }

    #[test]
    fn dual_bound_never_exceeds_the_error_it_certifies(
        raw_weights in prop::collection::vec(0.05f64..1.0, 9),
        shift in 0.0f64..1.0,
    ) {
        let nodes: Vec<Complex64> = (0..9)
            .map(|l| Complex64::new(0.0, -1.0 + 0.25 * l as f64 + shift / 5.0))
            .collect();
        let values: Vec<DMatrix<Complex64>> = nodes
            .iter()
            .map(|&x| DMatrix::from_fn(1, 2, |_, j| {
                if j == 0 { (x * x + 2.0).ln() } else { 1.0 / (x + 3.0) }
            }))
            .collect();
        let samples = SampleSet::new(nodes, values).unwrap();
        let degrees = DegreeSpec::uniform(1, 2, 2, 2).unwrap();
        let weights = WeightVector::normalized(raw_weights).unwrap();

        let eval = evaluate_dual(&samples, &degrees, &weights, 0.0).unwrap();
        let report = compute_errors(&samples, &eval.rational_at_nodes).unwrap();
        prop_assert!(
            eval.dual_value <= report.max_sq_error * (1.0 + 1e-10) + 1e-300,
            "bound {} exceeds error {}",
            eval.dual_value,
            report.max_sq_error
        );
    }
}
