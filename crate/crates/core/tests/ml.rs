mod common;

use std::f64::consts::PI;

use ndarray::{array, Array1};
use proptest::prelude::*;
use qsvm_churn::encoding::FeatureMapSpec;
use qsvm_churn::kernel::{kernel_matrix, KernelMode};
use qsvm_churn::ml::{
    accuracy, dual_objective, fit_linear, fit_logistic, linear_cost, linear_cost_gradient, logistic_cost,
    logistic_gradient, regression_metrics, svm_fit, svm_fit_with, svm_predict, Penalty, SmoOptions, SvmKernel,
};
use qsvm_churn::rng::seeded;
use qsvm_churn::FeatureMatrix64;
use rand::Rng;

use common::{brute_force_dual, central_difference, random_matrix, relative_error, svm_instance};

#[test]
fn smo_matches_brute_force_dual() {
    for seed in 0..20 {
        let (x, y, c, kernel) = svm_instance(seed);
        let gram = kernel.matrix(x.view(), x.view()).unwrap();
        let oracle = brute_force_dual(&gram, &y, c);
        let model = svm_fit(x.view(), &y, c, kernel).unwrap();
        let smo = dual_objective(model.dual_coefficients.view(), &y, gram.view());
        assert!((smo - oracle.objective).abs() <= 1e-6, "seed {seed}: {smo} vs {}", oracle.objective);
        if let Some(b) = oracle.bias {
            let (pred, f) = svm_predict(&model, x.view()).unwrap();
            for i in 0..y.len() {
                let g: f64 = (0..y.len()).map(|j| oracle.alpha[j] * f64::from(y[j]) * gram[[i, j]]).sum::<f64>() + b;
                // near-zero margins may tie-break either way
                if g.abs() > 1e-4 {
                    assert_eq!(pred[i], if g >= 0.0 { 1 } else { -1 }, "seed {seed} point {i}: {} vs {g}", f[i]);
                }
            }
        }
    }
}

#[test]
fn xor_is_separable_with_zz_gram() {
    let (a, b) = (PI / 4.0, 3.0 * PI / 4.0);
    let x = FeatureMatrix64::unnamed(array![[a, a], [a, b], [b, a], [b, b]]).unwrap();
    let y = [-1, 1, 1, -1];
    let spec = FeatureMapSpec::zz(2).unwrap();
    let gram = kernel_matrix(&spec, &x, None, KernelMode::Exact, 1).unwrap().values;

    // the exact dual optimum classifies all four points
    let c = 10.0;
    let oracle = brute_force_dual(&gram, &y, c);
    let b_oracle = oracle.bias.expect("a free support vector exists");
    for i in 0..4 {
        let f: f64 = (0..4).map(|j| oracle.alpha[j] * f64::from(y[j]) * gram[[i, j]]).sum::<f64>() + b_oracle;
        assert!(f * f64::from(y[i]) > 0.0);
    }

    let model = svm_fit(gram.view(), &y, c, SvmKernel::Precomputed).unwrap();
    let (pred, _) = svm_predict(&model, gram.view()).unwrap();
    assert_eq!(accuracy(&pred, &y).unwrap(), 1.0);
}

#[test]
fn two_point_model_predicts_training_labels_and_scales() {
    let x = array![[-1.0], [1.0]];
    let mut m = svm_fit(x.view(), &[-1, 1], 10.0, SvmKernel::Linear).unwrap();
    let probe = array![[-3.0], [-0.2], [0.0], [0.4], [2.0]];
    let (before, _) = svm_predict(&m, probe.view()).unwrap();
    assert_eq!(before, vec![-1, -1, 1, 1, 1]);
    m.dual_coefficients *= 7.5;
    m.bias *= 7.5;
    assert_eq!(svm_predict(&m, probe.view()).unwrap().0, before);
}

#[test]
fn linear_fit_matches_grid_minimizer() {
    let x = array![[0.0], [1.0], [3.0]];
    let y = array![1.0, 2.5, 3.5];
    for (penalty, lambda) in [(Penalty::None, 0.0), (Penalty::L2, 0.7), (Penalty::L1, 0.4)] {
        let cost = |t0: f64, t1: f64| linear_cost(array![t0, t1].view(), x.view(), y.view(), lambda, penalty).unwrap();
        // coarse grid over [-5, 5]^2, then a fine grid around the best cell
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..=1000 {
            for j in 0..=1000 {
                let (t0, t1) = (-5.0 + 0.01 * i as f64, -5.0 + 0.01 * j as f64);
                let c = cost(t0, t1);
                if c < best.0 {
                    best = (c, t0, t1);
                }
            }
        }
        let (_, c0, c1) = best;
        for i in -1000..=1000 {
            for j in -1000..=1000 {
                let (t0, t1) = (c0 + 1e-5 * i as f64, c1 + 1e-5 * j as f64);
                let c = cost(t0, t1);
                if c < best.0 {
                    best = (c, t0, t1);
                }
            }
        }
        let m = fit_linear(x.view(), y.view(), lambda, penalty).unwrap();
        assert!((m.theta[0] - best.1).abs() < 1e-3, "{penalty}: {} vs {}", m.theta[0], best.1);
        assert!((m.theta[1] - best.2).abs() < 1e-3, "{penalty}: {} vs {}", m.theta[1], best.2);
    }
}

#[test]
fn ridge_path_shrinks_monotonically() {
    let x = array![[0.5], [1.0], [2.0], [3.5], [4.0]];
    let y = array![1.0, 2.2, 2.9, 6.1, 7.4];
    let mut last = f64::INFINITY;
    for lambda in [0.0f64, 0.01, 0.1, 0.5, 1.0, 5.0, 20.0, 100.0, 1e4] {
        let m = fit_linear(x.view(), y.view(), lambda, Penalty::L2).unwrap();
        assert!(m.theta[1].abs() <= last + 1e-15);
        last = m.theta[1].abs();
    }
}

#[test]
fn logistic_fit_separates_one_dimensional_toy() {
    // theta = (0, t) with any t > 0 separates, so perfect accuracy is attainable
    let x = array![[-3.0], [-1.5], [-0.5], [0.5], [1.5], [3.0]];
    let y = array![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    let witness = array![0.0, 1.0];
    assert!(logistic_cost(witness.view(), x.view(), y.view(), 0.0).unwrap() < std::f64::consts::LN_2);
    let m = fit_logistic(x.view(), y.view(), 0.0, 200, 1.0).unwrap();
    let truth: Vec<u8> = y.iter().map(|v| *v as u8).collect();
    assert_eq!(m.predict(x.view()).unwrap(), truth);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn smo_satisfies_kkt_box_and_equality(seed in any::<u64>(), n in 4usize..=30, c in 0.1f64..20.0) {
        let mut rng = seeded(seed);
        let x = random_matrix(&mut rng, n, 3, -1.0, 1.0);
        let mut y: Vec<i8> = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
        y[0] = 1;
        y[1] = -1;
        let kernel = SvmKernel::Rbf { gamma: 1.5 };
        let gram = kernel.matrix(x.view(), x.view()).unwrap();
        let opts = SmoOptions { record_objective: true, ..SmoOptions::default() };
        let (model, report) = svm_fit_with(gram.view(), &y, c, SvmKernel::Precomputed, opts).unwrap();
        prop_assert!(report.converged);
        let eq: f64 = model.dual_coefficients.iter().zip(&y).map(|(a, l)| a * f64::from(*l)).sum();
        prop_assert!(eq.abs() <= 1e-9);
        prop_assert!(model.dual_coefficients.iter().all(|a| (0.0..=c).contains(a)));
        let kkt = model.kkt_residuals(gram.view()).unwrap();
        prop_assert!(kkt.iter().all(|r| *r <= 1e-3), "{kkt:?}");
        prop_assert!(report.objective_trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn linear_gradient_matches_finite_differences(seed in any::<u64>(), m in 2usize..=12, d in 1usize..=4, l2 in any::<bool>()) {
        let mut rng = seeded(seed);
        let x = random_matrix(&mut rng, m, d, -2.0, 2.0);
        let y = Array1::from_shape_fn(m, |_| rng.random_range(-3.0..3.0));
        let theta: Vec<f64> = (0..=d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (penalty, lambda) = if l2 { (Penalty::L2, 0.8) } else { (Penalty::None, 0.0) };
        let g = linear_cost_gradient(Array1::from(theta.clone()).view(), x.view(), y.view(), lambda, penalty).unwrap();
        let fd = central_difference(
            |t| linear_cost(Array1::from(t.to_vec()).view(), x.view(), y.view(), lambda, penalty).unwrap(),
            &theta,
            1e-5,
        );
        prop_assert!(relative_error(g.as_slice().unwrap(), &fd) <= 1e-6);
    }

    #[test]
    fn logistic_gradient_matches_finite_differences(seed in any::<u64>(), m in 2usize..=12, d in 1usize..=4, lambda in 0.0f64..2.0) {
        let mut rng = seeded(seed);
        let x = random_matrix(&mut rng, m, d, -2.0, 2.0);
        let y = Array1::from_shape_fn(m, |_| if rng.random_bool(0.5) { 1.0 } else { 0.0 });
        let theta: Vec<f64> = (0..=d).map(|_| rng.random_range(-1.5..1.5)).collect();
        let g = logistic_gradient(Array1::from(theta.clone()).view(), x.view(), y.view(), lambda).unwrap();
        let fd = central_difference(
            |t| logistic_cost(Array1::from(t.to_vec()).view(), x.view(), y.view(), lambda).unwrap(),
            &theta,
            1e-5,
        );
        prop_assert!(relative_error(g.as_slice().unwrap(), &fd) <= 1e-6);
    }

    #[test]
    fn adjusted_r2_never_exceeds_r2(seed in any::<u64>(), m in 4usize..=40, p in 1usize..=2) {
        prop_assume!(m > p + 1);
        let mut rng = seeded(seed);
        let y = Array1::from_shape_fn(m, |_| rng.random_range(-5.0..5.0));
        let y_hat = &y + &Array1::from_shape_fn(m, |_| rng.random_range(-2.0..2.0));
        let r = regression_metrics(y.view(), y_hat.view(), p).unwrap();
        prop_assert!(r.r2 <= 1.0);
        prop_assert!(r.adjusted_r2 <= r.r2);
        prop_assert_eq!(r.residuals.len(), m);
    }
}
