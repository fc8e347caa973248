use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Penalty {
    None,
    L1,
    L2,
}

impl fmt::Display for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Penalty::None => "NONE",
            Penalty::L1 => "L1",
            Penalty::L2 => "L2",
        })
    }
}

impl FromStr for Penalty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NONE" => Ok(Penalty::None),
            "L1" => Ok(Penalty::L1),
            "L2" => Ok(Penalty::L2),
            _ => Err(Error::Argument(format!("unknown penalty `{s}`"))),
        }
    }
}

/// Linear model `h(x) = theta[0] + theta[1..] . x`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel<T> {
    pub theta: Array1<T>,
    pub penalty: Penalty,
    pub lambda: T,
}

impl<T: Real> LinearModel<T> {
    pub fn predict(&self, x: ArrayView2<'_, T>) -> Result<Array1<T>> {
        check_theta(self.theta.view(), x)?;
        Ok(hypothesis(self.theta.view(), x))
    }
}

pub(crate) fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return Err(Error::Argument(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    Ok(())
}

pub(crate) fn check_theta<T: Real>(theta: ArrayView1<'_, T>, x: ArrayView2<'_, T>) -> Result<()> {
    if theta.len() != x.ncols() + 1 {
        return Err(Error::Shape(format!(
            "theta has {} entries, design has {} predictors (+ intercept)",
            theta.len(),
            x.ncols()
        )));
    }
    Ok(())
}

pub(crate) fn check_xy<T: Real>(x: ArrayView2<'_, T>, y: ArrayView1<'_, T>) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::Shape(format!("{} rows but {} targets", x.nrows(), y.len())));
    }
    if y.is_empty() {
        return Err(Error::Shape("no samples".into()));
    }
    Ok(())
}

pub(crate) fn hypothesis<T: Real>(theta: ArrayView1<'_, T>, x: ArrayView2<'_, T>) -> Array1<T> {
    x.dot(&theta.slice(ndarray::s![1..])) + theta[0]
}

fn penalty_value<T: Real>(theta: ArrayView1<'_, T>, lambda: T, penalty: Penalty, m: T) -> T {
    let coef = theta.slice(ndarray::s![1..]);
    match penalty {
        Penalty::None => T::zero(),
        Penalty::L2 => lambda / (T::lit(2.0) * m) * coef.iter().map(|t| *t * *t).sum::<T>(),
        Penalty::L1 => lambda / m * coef.iter().map(|t| t.abs()).sum::<T>(),
    }
}

/// `(1/2m) sum r^2` plus the penalty on `theta[1..]`.
pub fn linear_cost<T: Real>(
    theta: ArrayView1<'_, T>,
    x: ArrayView2<'_, T>,
    y: ArrayView1<'_, T>,
    lambda: T,
    penalty: Penalty,
) -> Result<T> {
    check_xy(x, y)?;
    check_theta(theta, x)?;
    check_lambda(lambda)?;
    let m = T::from_usize_lossy(y.len());
    let r = hypothesis(theta, x) - y;
    Ok(r.dot(&r) / (T::lit(2.0) * m) + penalty_value(theta, lambda, penalty, m))
}

/// Gradient of [`linear_cost`]. For L1 this is the subgradient with
/// `sign(0) = 0`.
pub fn linear_cost_gradient<T: Real>(
    theta: ArrayView1<'_, T>,
    x: ArrayView2<'_, T>,
    y: ArrayView1<'_, T>,
    lambda: T,
    penalty: Penalty,
) -> Result<Array1<T>> {
    check_xy(x, y)?;
    check_theta(theta, x)?;
    check_lambda(lambda)?;
    let m = T::from_usize_lossy(y.len());
    let r = hypothesis(theta, x) - y;
    let mut g = Array1::zeros(theta.len());
    g[0] = r.sum() / m;
    g.slice_mut(ndarray::s![1..]).assign(&(x.t().dot(&r) / m));
    for j in 1..theta.len() {
        g[j] += match penalty {
            Penalty::None => T::zero(),
            Penalty::L2 => lambda / m * theta[j],
            Penalty::L1 => {
                let s = if theta[j] > T::zero() {
                    T::one()
                } else if theta[j] < T::zero() {
                    -T::one()
                } else {
                    T::zero()
                };
                lambda / m * s
            }
        };
    }
    Ok(g)
}

fn with_intercept<T: Real>(x: ArrayView2<'_, T>) -> Array2<T> {
    let mut a = Array2::ones((x.nrows(), x.ncols() + 1));
    a.slice_mut(ndarray::s![.., 1..]).assign(&x);
    a
}

/// Fits by normal equations (NONE, L2) or coordinate descent (L1).
pub fn fit_linear<T: Real>(
    x: ArrayView2<'_, T>,
    y: ArrayView1<'_, T>,
    lambda: T,
    penalty: Penalty,
) -> Result<LinearModel<T>> {
    check_xy(x, y)?;
    check_lambda(lambda)?;
    let theta = match penalty {
        Penalty::None | Penalty::L2 => {
            let lambda_eff = if penalty == Penalty::None { T::zero() } else { lambda };
            let a = with_intercept(x);
            let mut normal = a.t().dot(&a);
            for j in 1..normal.nrows() {
                normal[[j, j]] += lambda_eff;
            }
            let rhs = a.t().dot(&y);
            solve(normal.view(), rhs.view())?
        }
        Penalty::L1 => lasso(x, y, lambda)?,
    };
    Ok(LinearModel {
        theta,
        penalty,
        lambda,
    })
}

fn soft_threshold<T: Real>(v: T, t: T) -> T {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        T::zero()
    }
}

fn lasso<T: Real>(x: ArrayView2<'_, T>, y: ArrayView1<'_, T>, lambda: T) -> Result<Array1<T>> {
    const MAX_SWEEPS: usize = 100_000;
    let m = T::from_usize_lossy(y.len());
    let d = x.ncols();
    let col_sq: Vec<T> = x.axis_iter(Axis(1)).map(|c| c.dot(&c) / m).collect();
    let mut theta = Array1::<T>::zeros(d + 1);
    // residual r = y - h(x)
    let mut r = y.to_owned();
    let tol = T::lit(1e-8);
    for _ in 0..MAX_SWEEPS {
        let mut max_change = T::zero();

        let shift = r.sum() / m;
        theta[0] += shift;
        r -= shift;
        max_change = max_change.max(shift.abs());

        for j in 0..d {
            let col = x.column(j);
            let old = theta[j + 1];
            let new = if col_sq[j] == T::zero() {
                T::zero()
            } else {
                let rho = col.dot(&r) / m + col_sq[j] * old;
                soft_threshold(rho, lambda / m) / col_sq[j]
            };
            let delta = new - old;
            if delta != T::zero() {
                r.scaled_add(-delta, &col);
                theta[j + 1] = new;
            }
            max_change = max_change.max(delta.abs());
        }
        if max_change < tol {
            return Ok(theta);
        }
    }
    Err(Error::Rank(format!(
        "coordinate descent did not converge in {MAX_SWEEPS} sweeps"
    )))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegMetrics<T> {
    pub r2: T,
    pub adjusted_r2: T,
    pub residuals: Array1<T>,
}

/// R-squared and adjusted R-squared for `p` predictors.
pub fn regression_metrics<T: Real>(
    y: ArrayView1<'_, T>,
    y_hat: ArrayView1<'_, T>,
    p: usize,
) -> Result<RegMetrics<T>> {
    if y.len() != y_hat.len() {
        return Err(Error::Shape(format!(
            "{} targets but {} predictions",
            y.len(),
            y_hat.len()
        )));
    }
    let m = y.len();
    if m <= p + 1 {
        return Err(Error::Argument(format!(
            "adjusted R-squared needs more than {} samples, got {m}",
            p + 1
        )));
    }
    let mean = y.sum() / T::from_usize_lossy(m);
    let ss_tot: T = y.iter().map(|v| (*v - mean) * (*v - mean)).sum();
    if ss_tot == T::zero() {
        return Err(Error::UndefinedR2);
    }
    let residuals = &y - &y_hat;
    let ss_res = residuals.dot(&residuals);
    let r2 = T::one() - ss_res / ss_tot;
    let adjusted_r2 = T::one()
        - (T::one() - r2) * T::from_usize_lossy(m - 1) / T::from_usize_lossy(m - p - 1);
    Ok(RegMetrics {
        r2,
        adjusted_r2,
        residuals,
    })
}
