mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use qsvm_churn::encoding::{build_feature_map, Entanglement, FeatureMapKind, FeatureMapSpec};
use qsvm_churn::kernel::{kernel_entry_exact, kernel_entry_sampled, kernel_matrix, KernelMode};
use qsvm_churn::quantum::{dense_unitary, StateVector};
use qsvm_churn::rng::seeded;
use qsvm_churn::FeatureMatrix64;
use rand::Rng;

use common::{min_eigenvalue, random_matrix};

fn kind_strategy() -> impl Strategy<Value = FeatureMapKind> {
    prop_oneof![Just(FeatureMapKind::Angle), Just(FeatureMapKind::Zz)]
}

fn ent_strategy() -> impl Strategy<Value = Entanglement> {
    prop_oneof![Just(Entanglement::Linear), Just(Entanglement::Ring), Just(Entanglement::Full)]
}

#[test]
fn exact_entry_matches_dense_oracle_overlap() {
    let mut rng = seeded(3);
    for kind in [FeatureMapKind::Angle, FeatureMapKind::Zz] {
        let spec = FeatureMapSpec::new(kind, 3, 2, Entanglement::Full).unwrap();
        for _ in 0..10 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..PI)).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..PI)).collect();
            let ux = dense_unitary(&build_feature_map(&spec, &x).unwrap()).unwrap();
            let uy = dense_unitary(&build_feature_map(&spec, &y).unwrap()).unwrap();
            // <0|Ux^dagger Uy|0> is the (0,0) entry of Ux^dagger Uy
            let overlap = ux.adjoint().matmul(&uy).get(0, 0).norm_sqr();
            assert!((kernel_entry_exact(&spec, &x, &y).unwrap() - overlap).abs() < 1e-12);
        }
    }
}

#[test]
fn sampled_agrees_with_exact_within_binomial_band() {
    let shots = 4096u64;
    let mut rng = seeded(21);
    let mut inside = 0;
    let probes = 100;
    for probe in 0..probes {
        let spec = FeatureMapSpec::new(FeatureMapKind::Zz, 2, 1, Entanglement::Linear).unwrap();
        let x: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..PI)).collect();
        let y: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..PI)).collect();
        let p = kernel_entry_exact(&spec, &x, &y).unwrap();
        let est = kernel_entry_sampled(&spec, &x, &y, shots, probe).unwrap();
        if (est - p).abs() <= 3.0 * (p * (1.0 - p) / shots as f64).sqrt() + 1e-9 {
            inside += 1;
        }
    }
    assert!(inside * 100 >= 95 * probes, "{inside}/{probes}");
}

#[test]
fn angle_encoding_is_injective_on_grid() {
    let spec = FeatureMapSpec::new(FeatureMapKind::Angle, 2, 1, Entanglement::Linear).unwrap();
    let grid: Vec<f64> = (1..8).map(|k| k as f64 * PI / 8.0).collect();
    let points: Vec<[f64; 2]> = grid.iter().flat_map(|a| grid.iter().map(move |b| [*a, *b])).collect();
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            assert!(kernel_entry_exact(&spec, p, q).unwrap() < 1.0 - 1e-12, "{p:?} {q:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn gram_is_symmetric_unit_diagonal_psd(
        seed in any::<u64>(),
        m in 1usize..=40,
        n in 1usize..=6,
        kind in kind_strategy(),
        ent in ent_strategy(),
        reps in 1usize..=2,
    ) {
        let mut rng = seeded(seed);
        let x = FeatureMatrix64::unnamed(random_matrix(&mut rng, m, n, 0.0, PI)).unwrap();
        let spec = FeatureMapSpec::new(kind, n, reps, ent).unwrap();
        let k = kernel_matrix(&spec, &x, None, KernelMode::Exact, 2).unwrap().values;
        for i in 0..m {
            prop_assert!((k[[i, i]] - 1.0).abs() <= 1e-9);
            for j in 0..m {
                prop_assert!((k[[i, j]] - k[[j, i]]).abs() <= 1e-9);
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&k[[i, j]]));
            }
        }
        prop_assert!(min_eigenvalue(&k) >= -1e-8);
    }

    #[test]
    fn emitted_circuits_preserve_norm(
        seed in any::<u64>(),
        n in 1usize..=6,
        kind in kind_strategy(),
        ent in ent_strategy(),
    ) {
        let mut rng = seeded(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..PI)).collect();
        let spec = FeatureMapSpec::new(kind, n, 2, ent).unwrap();
        let c = build_feature_map(&spec, &x).unwrap();
        prop_assert_eq!(&c, &build_feature_map(&spec, &x).unwrap());
        let s = StateVector::<f64>::ground_state(n).unwrap().apply_circuit(&c).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn worker_count_is_invisible(seed in any::<u64>(), m in 2usize..=12, workers in 2usize..=6, sampled in any::<bool>()) {
        let mut rng = seeded(seed);
        let x = FeatureMatrix64::unnamed(random_matrix(&mut rng, m, 3, 0.0, PI)).unwrap();
        let y = FeatureMatrix64::unnamed(random_matrix(&mut rng, 3, 3, 0.0, PI)).unwrap();
        let spec = FeatureMapSpec::zz(3).unwrap();
        let mode = if sampled { KernelMode::Sampled { shots: 256, seed } } else { KernelMode::Exact };
        let one = kernel_matrix(&spec, &x, Some(&y), mode, 1).unwrap();
        let many = kernel_matrix(&spec, &x, Some(&y), mode, workers).unwrap();
        prop_assert_eq!(one, many);
        let one = kernel_matrix(&spec, &x, None, mode, 1).unwrap();
        let many = kernel_matrix(&spec, &x, None, mode, workers).unwrap();
        prop_assert_eq!(one, many);
    }
}
