//! Binary soft-margin SVM trained by sequential minimal optimization.
//!
//! Working pairs are chosen by maximal KKT violation over the gradient of
//! `f(a) = 1/2 a'Qa - e'a`, `Q_ij = y_i y_j K_ij`.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{fmt_exact, Real};

pub const SMO_TOLERANCE: f64 = 1e-3;
pub const SMO_MAX_ITERATIONS: usize = 1_000_000;
const SUPPORT_THRESHOLD: f64 = 1e-12;
const MIN_CURVATURE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SvmKernel<T> {
    /// Inputs are Gram matrices / kernel rows.
    Precomputed,
    Linear,
    Rbf { gamma: T },
}

impl<T: Real> SvmKernel<T> {
    /// Kernel matrix between the rows of `a` and the rows of `b`.
    pub fn matrix(&self, a: ArrayView2<'_, T>, b: ArrayView2<'_, T>) -> Result<Array2<T>> {
        if a.ncols() != b.ncols() {
            return Err(Error::Shape(format!(
                "feature widths differ: {} vs {}",
                a.ncols(),
                b.ncols()
            )));
        }
        match *self {
            SvmKernel::Precomputed => Err(Error::Argument(
                "precomputed kernels have no feature form".into(),
            )),
            SvmKernel::Linear => Ok(a.dot(&b.t())),
            SvmKernel::Rbf { gamma } => {
                let mut k = Array2::zeros((a.nrows(), b.nrows()));
                for (i, ra) in a.outer_iter().enumerate() {
                    for (j, rb) in b.outer_iter().enumerate() {
                        let d: T = ra.iter().zip(rb).map(|(u, v)| (*u - *v) * (*u - *v)).sum();
                        k[[i, j]] = (-gamma * d).exp();
                    }
                }
                Ok(k)
            }
        }
    }
}

impl<T: Real> fmt::Display for SvmKernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SvmKernel::Precomputed => f.write_str("PRECOMPUTED"),
            SvmKernel::Linear => f.write_str("LINEAR"),
            SvmKernel::Rbf { gamma } => write!(f, "RBF({})", fmt_exact(*gamma)),
        }
    }
}

impl<T: Real + FromStr> FromStr for SvmKernel<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "PRECOMPUTED" => Ok(SvmKernel::Precomputed),
            "LINEAR" => Ok(SvmKernel::Linear),
            _ => {
                let gamma = s
                    .strip_prefix("RBF(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|g| g.parse::<T>().ok())
                    .ok_or_else(|| Error::Argument(format!("unknown kernel descriptor `{s}`")))?;
                Ok(SvmKernel::Rbf { gamma })
            }
        }
    }
}

/// `gamma = 1 / (num_features * var(X))`, variance over all entries.
pub fn rbf_gamma_scale<T: Real>(x: ArrayView2<'_, T>) -> Result<T> {
    if x.is_empty() {
        return Err(Error::Shape("empty design".into()));
    }
    let n = T::from_usize_lossy(x.len());
    let mean = x.sum() / n;
    let var = x.iter().map(|v| (*v - mean) * (*v - mean)).sum::<T>() / n;
    if var == T::zero() {
        return Ok(T::one());
    }
    Ok(T::one() / (T::from_usize_lossy(x.ncols()) * var))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel<T> {
    pub dual_coefficients: Array1<T>,
    pub labels: Vec<i8>,
    pub bias: T,
    pub penalty: T,
    pub kernel: SvmKernel<T>,
    pub support_indices: Vec<usize>,
    /// Training rows, needed to predict with a non-precomputed kernel.
    /// Not part of the text format; attach with [`SvmModel::with_training_features`].
    pub training_features: Option<Array2<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoReport<T> {
    pub iterations: usize,
    pub converged: bool,
    /// Dual objective after every iteration (only when requested).
    pub objective_trace: Vec<T>,
}

#[derive(Clone, Copy, Debug)]
pub struct SmoOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub record_objective: bool,
}

impl Default for SmoOptions {
    fn default() -> Self {
        SmoOptions {
            tolerance: SMO_TOLERANCE,
            max_iterations: SMO_MAX_ITERATIONS,
            record_objective: false,
        }
    }
}

fn check_labels(y: &[i8]) -> Result<()> {
    if let Some(v) = y.iter().find(|v| **v != 1 && **v != -1) {
        return Err(Error::Argument(format!("SVM labels must be -1 or +1, got {v}")));
    }
    if !(y.contains(&1) && y.contains(&-1)) {
        return Err(Error::DegenerateLabels("training labels contain a single class".into()));
    }
    Ok(())
}

/// `sum a - 1/2 sum_ij a_i a_j y_i y_j K_ij`.
pub fn dual_objective<T: Real>(alpha: ArrayView1<'_, T>, y: &[i8], gram: ArrayView2<'_, T>) -> T {
    let ay = Array1::from_iter(alpha.iter().zip(y).map(|(a, l)| *a * T::lit(f64::from(*l))));
    alpha.sum() - T::lit(0.5) * ay.dot(&gram.dot(&ay))
}

pub fn svm_fit<T: Real>(input: ArrayView2<'_, T>, y: &[i8], c: T, kernel: SvmKernel<T>) -> Result<SvmModel<T>> {
    svm_fit_with(input, y, c, kernel, SmoOptions::default()).map(|(m, _)| m)
}

/// `input` is the training Gram for [`SvmKernel::Precomputed`], else the
/// training feature rows.
pub fn svm_fit_with<T: Real>(
    input: ArrayView2<'_, T>,
    y: &[i8],
    c: T,
    kernel: SvmKernel<T>,
    options: SmoOptions,
) -> Result<(SvmModel<T>, SmoReport<T>)> {
    if !(c > T::zero()) || !c.is_finite() {
        return Err(Error::Argument(format!("C must be finite and > 0, got {c}")));
    }
    let (gram, features) = match kernel {
        SvmKernel::Precomputed => {
            if input.nrows() != input.ncols() {
                return Err(Error::Shape(format!(
                    "precomputed Gram must be square, got {}x{}",
                    input.nrows(),
                    input.ncols()
                )));
            }
            (input.to_owned(), None)
        }
        _ => (kernel.matrix(input, input)?, Some(input.to_owned())),
    };
    if gram.nrows() != y.len() {
        return Err(Error::Shape(format!(
            "{} training samples but {} labels",
            gram.nrows(),
            y.len()
        )));
    }
    check_labels(y)?;

    let n = y.len();
    let yf: Vec<T> = y.iter().map(|l| T::lit(f64::from(*l))).collect();
    let q = |i: usize, j: usize| yf[i] * yf[j] * gram[[i, j]];
    let eps = T::lit(options.tolerance);
    let tau = T::lit(MIN_CURVATURE);
    let mut alpha = vec![T::zero(); n];
    let mut grad = vec![-T::one(); n];
    let mut report = SmoReport {
        iterations: 0,
        converged: false,
        objective_trace: Vec::new(),
    };

    let up = |a: T, yt: T| (yt > T::zero() && a < c) || (yt < T::zero() && a > T::zero());
    let low = |a: T, yt: T| (yt > T::zero() && a > T::zero()) || (yt < T::zero() && a < c);

    while report.iterations < options.max_iterations {
        let mut i = usize::MAX;
        let mut gmax = T::neg_infinity();
        let mut j = usize::MAX;
        let mut gmin = T::infinity();
        for t in 0..n {
            let v = -yf[t] * grad[t];
            if up(alpha[t], yf[t]) && v > gmax {
                gmax = v;
                i = t;
            }
            if low(alpha[t], yf[t]) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < eps {
            report.converged = true;
            break;
        }

        let (ai_old, aj_old) = (alpha[i], alpha[j]);
        if yf[i] != yf[j] {
            let mut quad = q(i, i) + q(j, j) + T::lit(2.0) * q(i, j);
            if quad <= T::zero() {
                quad = tau;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > T::zero() {
                if alpha[j] < T::zero() {
                    alpha[j] = T::zero();
                    alpha[i] = diff;
                }
            } else if alpha[i] < T::zero() {
                alpha[i] = T::zero();
                alpha[j] = -diff;
            }
            if diff > T::zero() {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - T::lit(2.0) * q(i, j);
            if quad <= T::zero() {
                quad = tau;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < T::zero() {
                alpha[j] = T::zero();
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < T::zero() {
                alpha[i] = T::zero();
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - ai_old, alpha[j] - aj_old);
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
        report.iterations += 1;
        if options.record_objective {
            // f = 1/2 a'(G - e), dual = -f
            let f: T = alpha.iter().zip(&grad).map(|(a, g)| *a * (*g - T::one())).sum::<T>() * T::lit(0.5);
            report.objective_trace.push(-f);
        }
    }

    let bias = -rho(&alpha, &grad, &yf, c);
    let dual_coefficients = Array1::from(alpha);
    let support_indices = support_of(dual_coefficients.view());
    Ok((
        SvmModel {
            dual_coefficients,
            labels: y.to_vec(),
            bias,
            penalty: c,
            kernel,
            support_indices,
            training_features: features,
        },
        report,
    ))
}

fn support_of<T: Real>(alpha: ArrayView1<'_, T>) -> Vec<usize> {
    alpha
        .iter()
        .enumerate()
        .filter(|(_, a)| **a > T::lit(SUPPORT_THRESHOLD))
        .map(|(i, _)| i)
        .collect()
}

/// Offset `rho` with decision `f(x) = sum a y K - rho`: mean of `y_i G_i` over
/// free vectors, else the midpoint of the feasible interval.
fn rho<T: Real>(alpha: &[T], grad: &[T], y: &[T], c: T) -> T {
    let mut ub = T::infinity();
    let mut lb = T::neg_infinity();
    let mut sum = T::zero();
    let mut free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < T::zero() {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= T::zero() {
            if y[t] > T::zero() {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    if free > 0 {
        sum / T::from_usize_lossy(free)
    } else {
        (ub + lb) * T::lit(0.5)
    }
}

impl<T: Real> SvmModel<T> {
    pub fn num_training(&self) -> usize {
        self.labels.len()
    }

    pub fn with_training_features(mut self, features: Array2<T>) -> Result<Self> {
        if features.nrows() != self.num_training() {
            return Err(Error::Shape(format!(
                "{} feature rows for {} training samples",
                features.nrows(),
                self.num_training()
            )));
        }
        self.training_features = Some(features);
        Ok(self)
    }

    fn kernel_rows(&self, rows: ArrayView2<'_, T>) -> Result<Array2<T>> {
        match self.kernel {
            SvmKernel::Precomputed => {
                if rows.ncols() != self.num_training() {
                    return Err(Error::Shape(format!(
                        "kernel rows have {} columns, model has {} training samples",
                        rows.ncols(),
                        self.num_training()
                    )));
                }
                Ok(rows.to_owned())
            }
            _ => {
                let train = self.training_features.as_ref().ok_or_else(|| {
                    Error::Argument("model has no training features attached".into())
                })?;
                self.kernel.matrix(rows, train.view())
            }
        }
    }

    /// `sum_i a_i y_i K(x_i, x) + b` for each row.
    pub fn decision_function(&self, rows: ArrayView2<'_, T>) -> Result<Array1<T>> {
        let k = self.kernel_rows(rows)?;
        let coef: Vec<(usize, T)> = self
            .support_indices
            .iter()
            .map(|&i| (i, self.dual_coefficients[i] * T::lit(f64::from(self.labels[i]))))
            .collect();
        let values: Vec<T> = (0..k.nrows())
            .into_par_iter()
            .map(|r| k.row(r))
            .map(|row| coef.iter().map(|(i, w)| *w * row[*i]).sum::<T>() + self.bias)
            .collect();
        Ok(Array1::from(values))
    }

    /// `y_i f(x_i) - 1` slack per training point, against the training Gram.
    pub fn kkt_residuals(&self, gram: ArrayView2<'_, T>) -> Result<Array1<T>> {
        let f = self.decision_function(gram)?;
        let c = self.penalty;
        Ok(Array1::from_iter(f.iter().enumerate().map(|(i, fi)| {
            let g = T::lit(f64::from(self.labels[i])) * *fi - T::one();
            let a = self.dual_coefficients[i];
            if a <= T::zero() {
                (-g).max(T::zero())
            } else if a >= c {
                g.max(T::zero())
            } else {
                g.abs()
            }
        })))
    }
}

/// Labels `sign(f(x))` with `sign(0) = +1`, plus the decision values.
///
/// `rows` are kernel rows against the training samples for a precomputed
/// model, feature rows otherwise.
pub fn svm_predict<T: Real>(model: &SvmModel<T>, rows: ArrayView2<'_, T>) -> Result<(Vec<i8>, Array1<T>)> {
    let f = model.decision_function(rows)?;
    let labels = f.iter().map(|v| if *v >= T::zero() { 1 } else { -1 }).collect();
    Ok((labels, f))
}

pub fn model_to_string<T: Real>(model: &SvmModel<T>) -> String {
    let mut out = String::from("SVM v1\n");
    out.push_str(&format!("C {}\n", fmt_exact(model.penalty)));
    out.push_str(&format!("kernel {}\n", model.kernel));
    out.push_str(&format!("b {}\n", fmt_exact(model.bias)));
    for (i, (l, a)) in model.labels.iter().zip(&model.dual_coefficients).enumerate() {
        out.push_str(&format!("{i} {l} {}\n", fmt_exact(*a)));
    }
    out
}

pub fn save_model<T: Real>(model: &SvmModel<T>, path: &Path) -> Result<()> {
    fs::write(path, model_to_string(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model<T: Real + FromStr>(path: &Path) -> Result<SvmModel<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text)
}

pub fn parse_model<T: Real + FromStr>(text: &str) -> Result<SvmModel<T>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let fmt_err = |line: usize, message: String| Error::Format { line, message };
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| fmt_err(0, format!("unexpected end of input, expected {what}")))
    };
    let (ln, header) = next("header")?;
    if header != "SVM v1" {
        return Err(fmt_err(ln, format!("expected `SVM v1`, got `{header}`")));
    }
    let mut keyed = |key: &str| -> Result<(usize, String)> {
        let (ln, l) = next(key)?;
        l.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .map(|v| (ln, v.trim().to_string()))
            .ok_or_else(|| fmt_err(ln, format!("expected `{key} ...`, got `{l}`")))
    };
    let real = |ln: usize, v: &str| {
        v.parse::<T>()
            .map_err(|_| fmt_err(ln, format!("`{v}` is not a number")))
    };
    let (ln, c) = keyed("C")?;
    let penalty = real(ln, &c)?;
    let (ln, k) = keyed("kernel")?;
    let kernel = k.parse::<SvmKernel<T>>().map_err(|e| fmt_err(ln, e.to_string()))?;
    let (ln, b) = keyed("b")?;
    let bias = real(ln, &b)?;

    let mut labels = Vec::new();
    let mut alpha = Vec::new();
    for (ln, l) in lines {
        if l.is_empty() {
            continue;
        }
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(fmt_err(ln, format!("expected `index label alpha`, got `{l}`")));
        }
        if parts[0].parse::<usize>().ok() != Some(labels.len()) {
            return Err(fmt_err(ln, format!("expected index {}, got `{}`", labels.len(), parts[0])));
        }
        let label = match parts[1] {
            "1" | "+1" => 1,
            "-1" => -1,
            other => return Err(fmt_err(ln, format!("label must be -1 or 1, got `{other}`"))),
        };
        labels.push(label);
        alpha.push(real(ln, parts[2])?);
    }
    let dual_coefficients = Array1::from(alpha);
    let support_indices = support_of(dual_coefficients.view());
    Ok(SvmModel {
        dual_coefficients,
        labels,
        bias,
        penalty,
        kernel,
        support_indices,
        training_features: None,
    })
}
