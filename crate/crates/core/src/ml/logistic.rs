use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::ml::regression::{check_lambda, check_theta, check_xy, hypothesis};
use crate::scalar::Real;

const PROB_FLOOR: f64 = 1e-12;
const MAX_HALVINGS: usize = 40;

/// Logistic function, evaluated without overflow for any finite `z`.
pub fn sigmoid<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogisticModel<T> {
    pub theta: Array1<T>,
    pub lambda: T,
    /// Cost after each accepted step, starting with the initial cost.
    pub cost_trace: Vec<T>,
}

impl<T: Real> LogisticModel<T> {
    pub fn predict_proba(&self, x: ArrayView2<'_, T>) -> Result<Array1<T>> {
        check_theta(self.theta.view(), x)?;
        Ok(hypothesis(self.theta.view(), x).mapv(sigmoid))
    }

    /// Class 1 when the probability is at least one half.
    pub fn predict(&self, x: ArrayView2<'_, T>) -> Result<Vec<u8>> {
        Ok(self
            .predict_proba(x)?
            .iter()
            .map(|p| u8::from(*p >= T::lit(0.5)))
            .collect())
    }
}

fn check_binary<T: Real>(y: ArrayView1<'_, T>) -> Result<()> {
    if let Some(v) = y.iter().find(|v| **v != T::zero() && **v != T::one()) {
        return Err(Error::Argument(format!("logistic targets must be 0 or 1, got {v}")));
    }
    Ok(())
}

/// Mean cross-entropy plus `(lambda/2m) sum theta[1..]^2`.
pub fn logistic_cost<T: Real>(
    theta: ArrayView1<'_, T>,
    x: ArrayView2<'_, T>,
    y: ArrayView1<'_, T>,
    lambda: T,
) -> Result<T> {
    check_xy(x, y)?;
    check_theta(theta, x)?;
    check_lambda(lambda)?;
    check_binary(y)?;
    Ok(cost_unchecked(theta, x, y, lambda))
}

fn cost_unchecked<T: Real>(theta: ArrayView1<'_, T>, x: ArrayView2<'_, T>, y: ArrayView1<'_, T>, lambda: T) -> T {
    let m = T::from_usize_lossy(y.len());
    let floor = T::lit(PROB_FLOOR);
    let ce: T = hypothesis(theta, x)
        .iter()
        .zip(y)
        .map(|(z, t)| {
            let h = sigmoid(*z).max(floor).min(T::one() - floor);
            -(*t * h.ln() + (T::one() - *t) * (T::one() - h).ln())
        })
        .sum();
    let reg: T = theta.iter().skip(1).map(|t| *t * *t).sum();
    ce / m + lambda / (T::lit(2.0) * m) * reg
}

/// Gradient of [`logistic_cost`] (ignoring the probability clamp).
pub fn logistic_gradient<T: Real>(
    theta: ArrayView1<'_, T>,
    x: ArrayView2<'_, T>,
    y: ArrayView1<'_, T>,
    lambda: T,
) -> Result<Array1<T>> {
    check_xy(x, y)?;
    check_theta(theta, x)?;
    check_lambda(lambda)?;
    check_binary(y)?;
    Ok(gradient_unchecked(theta, x, y, lambda))
}

fn gradient_unchecked<T: Real>(
    theta: ArrayView1<'_, T>,
    x: ArrayView2<'_, T>,
    y: ArrayView1<'_, T>,
    lambda: T,
) -> Array1<T> {
    let m = T::from_usize_lossy(y.len());
    let err = hypothesis(theta, x).mapv(sigmoid) - y;
    let mut g = Array1::zeros(theta.len());
    g[0] = err.sum() / m;
    let body = x.t().dot(&err) / m + &theta.slice(ndarray::s![1..]).mapv(|t| lambda / m * t);
    g.slice_mut(ndarray::s![1..]).assign(&body);
    g
}

/// Full-batch gradient descent from `theta = 0`.
///
/// Each epoch starts from `learning_rate` and halves the step until the cost
/// does not increase; if no step is accepted the fit stops early.
pub fn fit_logistic<T: Real>(
    x: ArrayView2<'_, T>,
    y: ArrayView1<'_, T>,
    lambda: T,
    epochs: usize,
    learning_rate: T,
) -> Result<LogisticModel<T>> {
    check_xy(x, y)?;
    check_lambda(lambda)?;
    check_binary(y)?;
    if !(learning_rate > T::zero()) {
        return Err(Error::Argument(format!("learning rate must be > 0, got {learning_rate}")));
    }
    let mut theta = Array1::<T>::zeros(x.ncols() + 1);
    let mut cost = cost_unchecked(theta.view(), x, y, lambda);
    let mut cost_trace = vec![cost];
    'epochs: for _ in 0..epochs {
        let g = gradient_unchecked(theta.view(), x, y, lambda);
        let mut step = learning_rate;
        for _ in 0..MAX_HALVINGS {
            let candidate = &theta - &(&g * step);
            let c = cost_unchecked(candidate.view(), x, y, lambda);
            if c <= cost {
                theta = candidate;
                cost = c;
                cost_trace.push(cost);
                continue 'epochs;
            }
            step *= T::lit(0.5);
        }
        break;
    }
    Ok(LogisticModel {
        theta,
        lambda,
        cost_trace,
    })
}
