//! Variational quantum classifier: feature map, trainable ansatz, Z readout,
//! classical gradient descent on the parameters.

use ndarray::ArrayView2;
use rayon::prelude::*;

use crate::encoding::{build_ansatz, build_feature_map, AnsatzSpec, FeatureMapSpec};
use crate::error::{Error, Result};
use crate::quantum::StateVector;
use crate::scalar::{fmt_exact, Real};

const PROB_FLOOR: f64 = 1e-12;
const MAX_HALVINGS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct VariationalModel<T> {
    pub feature_map: FeatureMapSpec,
    pub ansatz: AnsatzSpec,
    pub params: Vec<T>,
    pub readout_qubit: usize,
}

impl<T: Real> VariationalModel<T> {
    pub fn new(feature_map: FeatureMapSpec, ansatz: AnsatzSpec, params: Vec<T>, readout_qubit: usize) -> Result<Self> {
        feature_map.validate()?;
        if ansatz.num_qubits != feature_map.num_qubits() {
            return Err(Error::Shape(format!(
                "ansatz has {} qubits, feature map {}",
                ansatz.num_qubits,
                feature_map.num_qubits()
            )));
        }
        if params.len() != ansatz.param_count() {
            return Err(Error::Shape(format!(
                "ansatz takes {} parameters, got {}",
                ansatz.param_count(),
                params.len()
            )));
        }
        if readout_qubit >= ansatz.num_qubits {
            return Err(Error::Index(format!(
                "readout qubit {readout_qubit} on a {}-qubit model",
                ansatz.num_qubits
            )));
        }
        Ok(VariationalModel {
            feature_map,
            ansatz,
            params,
            readout_qubit,
        })
    }

    /// All parameters zero.
    pub fn zeros(feature_map: FeatureMapSpec, ansatz: AnsatzSpec, readout_qubit: usize) -> Result<Self> {
        Self::new(feature_map, ansatz, vec![T::zero(); ansatz.param_count()], readout_qubit)
    }

    fn encoded(&self, x: &[T]) -> Result<StateVector<T>> {
        if x.len() != self.feature_map.num_features {
            return Err(Error::Shape(format!(
                "model takes {} features, got {}",
                self.feature_map.num_features,
                x.len()
            )));
        }
        StateVector::ground_state(self.feature_map.num_qubits())?
            .apply_circuit(&build_feature_map(&self.feature_map, x)?)
    }

    fn readout(&self, encoded: &StateVector<T>, params: &[T]) -> Result<T> {
        encoded
            .clone()
            .apply_circuit(&build_ansatz(&self.ansatz, params)?)?
            .expectation_z(self.readout_qubit)
    }

    fn shift_gradient_from(&self, encoded: &StateVector<T>) -> Result<Vec<T>> {
        let shift = T::FRAC_PI_2();
        let mut params = self.params.clone();
        (0..params.len())
            .map(|k| {
                let orig = params[k];
                params[k] = orig + shift;
                let plus = self.readout(encoded, &params)?;
                params[k] = orig - shift;
                let minus = self.readout(encoded, &params)?;
                params[k] = orig;
                Ok((plus - minus) * T::lit(0.5))
            })
            .collect()
    }
}

/// `<Z>` on the readout qubit after feature map and ansatz.
pub fn vqc_expectation<T: Real>(model: &VariationalModel<T>, x: &[T]) -> Result<T> {
    model.readout(&model.encoded(x)?, &model.params)
}

/// `p = (1 - <Z>) / 2`, the probability of measuring 1 on the readout qubit.
pub fn vqc_forward<T: Real>(model: &VariationalModel<T>, x: &[T]) -> Result<T> {
    let p = (T::one() - vqc_expectation(model, x)?) * T::lit(0.5);
    Ok(p.max(T::zero()).min(T::one()))
}

/// `d<Z>/d params` by the two-term shift rule.
pub fn expectation_gradient<T: Real>(model: &VariationalModel<T>, x: &[T]) -> Result<Vec<T>> {
    model.shift_gradient_from(&model.encoded(x)?)
}

fn check_data<T: Real>(model: &VariationalModel<T>, x: ArrayView2<'_, T>, y: &[T]) -> Result<()> {
    if x.nrows() == 0 {
        return Err(Error::Argument("empty dataset".into()));
    }
    if x.nrows() != y.len() {
        return Err(Error::Shape(format!("{} rows but {} labels", x.nrows(), y.len())));
    }
    if x.ncols() != model.feature_map.num_features {
        return Err(Error::Shape(format!(
            "model takes {} features, data has {}",
            model.feature_map.num_features,
            x.ncols()
        )));
    }
    if let Some(v) = y.iter().find(|v| **v != T::zero() && **v != T::one()) {
        return Err(Error::Argument(format!("labels must be 0 or 1, got {v}")));
    }
    Ok(())
}

fn clamp<T: Real>(p: T) -> T {
    let floor = T::lit(PROB_FLOOR);
    p.max(floor).min(T::one() - floor)
}

fn cross_entropy<T: Real>(p: T, y: T) -> T {
    let p = clamp(p);
    -(y * p.ln() + (T::one() - y) * (T::one() - p).ln())
}

fn row<T: Real>(x: ArrayView2<'_, T>, i: usize) -> Vec<T> {
    x.row(i).to_vec()
}

/// Mean cross-entropy, probabilities clamped to `[1e-12, 1 - 1e-12]`.
pub fn vqc_loss<T: Real>(model: &VariationalModel<T>, x: ArrayView2<'_, T>, y: &[T]) -> Result<T> {
    check_data(model, x, y)?;
    let terms: Vec<T> = (0..x.nrows())
        .into_par_iter()
        .map(|i| Ok(cross_entropy(vqc_forward(model, &row(x, i))?, y[i])))
        .collect::<Result<_>>()?;
    Ok(terms.into_iter().sum::<T>() / T::from_usize_lossy(y.len()))
}

/// Gradient of [`vqc_loss`] with respect to the parameters.
pub fn parameter_shift_gradient<T: Real>(model: &VariationalModel<T>, x: ArrayView2<'_, T>, y: &[T]) -> Result<Vec<T>> {
    check_data(model, x, y)?;
    let per_sample: Vec<Vec<T>> = (0..x.nrows())
        .into_par_iter()
        .map(|i| {
            let encoded = model.encoded(&row(x, i))?;
            let z = model.readout(&encoded, &model.params)?;
            let p = (T::one() - z) * T::lit(0.5);
            let floor = T::lit(PROB_FLOOR);
            // the clamp is flat outside its range
            let dl_dp = if p <= floor || p >= T::one() - floor {
                T::zero()
            } else {
                -y[i] / p + (T::one() - y[i]) / (T::one() - p)
            };
            let dz = model.shift_gradient_from(&encoded)?;
            Ok(dz.into_iter().map(|g| dl_dp * (-T::lit(0.5) * g)).collect())
        })
        .collect::<Result<_>>()?;
    let m = T::from_usize_lossy(y.len());
    let mut grad = vec![T::zero(); model.params.len()];
    for sample in per_sample {
        for (g, s) in grad.iter_mut().zip(sample) {
            *g += s;
        }
    }
    Ok(grad.into_iter().map(|g| g / m).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainTrace<T> {
    /// Loss after each epoch.
    pub epoch_losses: Vec<T>,
    pub final_params: Vec<T>,
    pub seed: u64,
}

impl<T: Real> TrainTrace<T> {
    /// `epoch loss` lines, epochs counted from 1.
    pub fn to_text(&self) -> String {
        self.epoch_losses
            .iter()
            .enumerate()
            .map(|(e, l)| format!("{} {}\n", e + 1, fmt_exact(*l)))
            .collect()
    }
}

/// Full-batch gradient descent. A step is accepted only if the loss does not
/// increase; the step is halved up to 20 times, after which training stops.
///
/// The optimizer is deterministic; `seed` is carried into the trace so runs
/// can be matched to their configuration.
pub fn vqc_train<T: Real>(
    model: &VariationalModel<T>,
    x: ArrayView2<'_, T>,
    y: &[T],
    epochs: usize,
    learning_rate: T,
    seed: u64,
) -> Result<(VariationalModel<T>, TrainTrace<T>)> {
    check_data(model, x, y)?;
    if !(learning_rate > T::zero()) {
        return Err(Error::Argument(format!("learning rate must be > 0, got {learning_rate}")));
    }
    let mut current = model.clone();
    let mut losses = Vec::with_capacity(epochs);
    if epochs > 0 {
        let mut loss = vqc_loss(&current, x, y)?;
        'epochs: for _ in 0..epochs {
            let grad = parameter_shift_gradient(&current, x, y)?;
            let mut step = learning_rate;
            for _ in 0..=MAX_HALVINGS {
                let mut candidate = current.clone();
                for (p, g) in candidate.params.iter_mut().zip(&grad) {
                    *p -= step * *g;
                }
                let l = vqc_loss(&candidate, x, y)?;
                if l <= loss {
                    current = candidate;
                    loss = l;
                    losses.push(loss);
                    continue 'epochs;
                }
                step *= T::lit(0.5);
            }
            losses.push(loss);
            break;
        }
    }
    let trace = TrainTrace {
        epoch_losses: losses,
        final_params: current.params.clone(),
        seed,
    };
    Ok((current, trace))
}

/// Class 1 when `p >= 1/2`.
pub fn vqc_predict<T: Real>(model: &VariationalModel<T>, x: ArrayView2<'_, T>) -> Result<Vec<u8>> {
    (0..x.nrows())
        .into_par_iter()
        .map(|i| Ok(u8::from(vqc_forward(model, &row(x, i))? >= T::lit(0.5))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{Entanglement, FeatureMapKind};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn angle(n: usize) -> FeatureMapSpec {
        FeatureMapSpec::new(FeatureMapKind::Angle, n, 1, Entanglement::Linear).unwrap()
    }

    fn single(theta: f64) -> VariationalModel<f64> {
        VariationalModel::new(angle(1), AnsatzSpec::new(1, 1).unwrap(), vec![theta], 0).unwrap()
    }

    #[test]
    fn forward_examples() {
        let m = VariationalModel::<f64>::zeros(angle(2), AnsatzSpec::new(2, 1).unwrap(), 0).unwrap();
        assert_eq!(vqc_forward(&m, &[0.0, 0.0]).unwrap(), 0.0);
        assert!((vqc_forward(&single(PI), &[0.0]).unwrap() - 1.0).abs() < 1e-9);
        assert!(matches!(vqc_forward(&m, &[0.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn shift_rule_on_cosine() {
        assert!((expectation_gradient(&single(FRAC_PI_2), &[0.0]).unwrap()[0] + 1.0).abs() < 1e-9);
        assert!(expectation_gradient(&single(0.0), &[0.0]).unwrap()[0].abs() < 1e-9);
    }

    #[test]
    fn half_probability_loss() {
        let m = single(FRAC_PI_2);
        let x = ndarray::array![[0.0], [0.0]];
        let l = vqc_loss(&m, x.view(), &[0.0, 1.0]).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-9);
        assert!(matches!(
            vqc_loss(&m, ndarray::Array2::zeros((0, 1)).view(), &[]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn zero_epochs_is_identity() {
        let m = single(0.3);
        let x = ndarray::array![[0.1], [2.0]];
        let (out, trace) = vqc_train(&m, x.view(), &[0.0, 1.0], 0, 0.5, 7).unwrap();
        assert_eq!(out, m);
        assert!(trace.epoch_losses.is_empty());
    }
}
