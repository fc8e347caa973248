mod common;

use std::f64::consts::PI;

use ndarray::{array, Array2};
use proptest::prelude::*;
use qsvm_churn::encoding::{build_ansatz, build_feature_map, scale_features, AnsatzSpec, Entanglement, FeatureMapKind, FeatureMapSpec};
use qsvm_churn::quantum::{Gate, StateVector};
use qsvm_churn::rng::seeded;
use qsvm_churn::variational::{
    parameter_shift_gradient, vqc_forward, vqc_loss, vqc_predict, vqc_train, VariationalModel,
};
use qsvm_churn::FeatureMatrix64;
use rand::Rng;

use common::{random_matrix, relative_error, richardson_difference};

fn toy() -> (Array2<f64>, Vec<f64>) {
    let raw = array![[0.1, 0.9], [0.3, 0.6], [0.7, 0.2], [0.95, 0.4]];
    let y: Vec<f64> = raw.rows().into_iter().map(|r| if r[0] > r[1] { 1.0 } else { 0.0 }).collect();
    let scaled = scale_features(&FeatureMatrix64::unnamed(raw).unwrap(), 0.0, PI).unwrap();
    (scaled.into_values(), y)
}

fn toy_model(params: Vec<f64>) -> VariationalModel<f64> {
    let fm = FeatureMapSpec::new(FeatureMapKind::Angle, 2, 1, Entanglement::Linear).unwrap();
    VariationalModel::new(fm, AnsatzSpec::new(2, 1).unwrap(), params, 0).unwrap()
}

fn accuracy(pred: &[u8], y: &[f64]) -> f64 {
    pred.iter().zip(y).filter(|(p, t)| f64::from(**p) == **t).count() as f64 / y.len() as f64
}

#[test]
fn toy_is_separable_by_some_parameter_pair() {
    let (x, y) = toy();
    let steps = 100;
    let found = (0..steps).flat_map(|i| (0..steps).map(move |j| (i, j))).any(|(i, j)| {
        let t = |k: usize| -PI + 2.0 * PI * k as f64 / steps as f64;
        let m = toy_model(vec![t(i), t(j)]);
        accuracy(&vqc_predict(&m, x.view()).unwrap(), &y) == 1.0
    });
    assert!(found);
}

#[test]
fn training_reaches_full_accuracy_on_toy() {
    let (x, y) = toy();
    let (trained, trace) = vqc_train(&toy_model(vec![0.0, 0.0]), x.view(), &y, 300, 0.5, 7).unwrap();
    assert_eq!(accuracy(&vqc_predict(&trained, x.view()).unwrap(), &y), 1.0);
    assert!(trace.epoch_losses.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(trace.final_params, trained.params);
}

#[test]
fn training_is_deterministic() {
    let (x, y) = toy();
    let a = vqc_train(&toy_model(vec![0.3, -0.2]), x.view(), &y, 50, 0.5, 1).unwrap();
    let b = vqc_train(&toy_model(vec![0.3, -0.2]), x.view(), &y, 50, 0.5, 1).unwrap();
    assert_eq!(a.1.to_text(), b.1.to_text());
    assert_eq!(a.0, b.0);
}

#[test]
fn single_qubit_ry_pi_reads_one() {
    let fm = FeatureMapSpec::new(FeatureMapKind::Angle, 1, 1, Entanglement::Linear).unwrap();
    let m = VariationalModel::new(fm, AnsatzSpec::new(1, 1).unwrap(), vec![PI], 0).unwrap();
    assert!((vqc_forward(&m, &[0.0]).unwrap() - 1.0).abs() < 1e-12);
}

fn random_model(rng: &mut impl Rng, n: usize, layers: usize) -> VariationalModel<f64> {
    let kind = if rng.random_bool(0.5) { FeatureMapKind::Angle } else { FeatureMapKind::Zz };
    let fm = FeatureMapSpec::new(kind, n, 1, Entanglement::Linear).unwrap();
    let ansatz = AnsatzSpec::new(n, layers).unwrap();
    let params = (0..ansatz.param_count()).map(|_| rng.random_range(-PI..PI)).collect();
    VariationalModel::new(fm, ansatz, params, rng.random_range(0..n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn parameter_shift_matches_finite_differences(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=8) {
        let mut rng = seeded(seed);
        let layers = rng.random_range(1..=8 / n);
        let model = random_model(&mut rng, n, layers);
        let x = random_matrix(&mut rng, m, n, 0.0, PI);
        let y: Vec<f64> = (0..m).map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 }).collect();
        let g = parameter_shift_gradient(&model, x.view(), &y).unwrap();
        // saturated probabilities make plain central differences too coarse
        let fd = richardson_difference(
            |p| {
                let mut probe = model.clone();
                probe.params = p.to_vec();
                vqc_loss(&probe, x.view(), &y).unwrap()
            },
            &model.params,
            1e-5,
        );
        prop_assert!(relative_error(&g, &fd) <= 1e-6, "{g:?} vs {fd:?}");
    }

    #[test]
    fn appended_phase_leaves_readout_probability(seed in any::<u64>(), n in 1usize..=3, gamma in -PI..PI) {
        let mut rng = seeded(seed);
        let model = random_model(&mut rng, n, 2);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..PI)).collect();
        let mut c = build_feature_map(&model.feature_map, &x).unwrap();
        c.append(&build_ansatz(&model.ansatz, &model.params).unwrap()).unwrap();
        c.push(Gate::Phase(rng.random_range(0..n), gamma)).unwrap();
        let probs = StateVector::ground_state(n).unwrap().apply_circuit(&c).unwrap().probabilities().unwrap();
        let p_one: f64 = probs
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> model.readout_qubit & 1 == 1)
            .map(|(_, p)| p)
            .sum();
        prop_assert!((vqc_forward(&model, &x).unwrap() - p_one).abs() <= 1e-12);
    }

    #[test]
    fn accepted_steps_never_raise_loss(seed in any::<u64>(), m in 2usize..=6) {
        let mut rng = seeded(seed);
        let model = random_model(&mut rng, 2, 1);
        let x = random_matrix(&mut rng, m, 2, 0.0, PI);
        let y: Vec<f64> = (0..m).map(|i| (i % 2) as f64).collect();
        let (_, trace) = vqc_train(&model, x.view(), &y, 15, 1.0, seed).unwrap();
        let start = vqc_loss(&model, x.view(), &y).unwrap();
        prop_assert!(trace.epoch_losses.first().is_none_or(|l| *l <= start));
        prop_assert!(trace.epoch_losses.windows(2).all(|w| w[1] <= w[0]));
    }
}
