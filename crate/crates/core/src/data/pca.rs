use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::data::matrix::FeatureMatrix;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::scalar::Real;

/// Principal components of the sample covariance (centered, not standardized).
#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel<T> {
    pub mean: Array1<T>,
    /// `k x d`, orthonormal rows.
    pub components: Array2<T>,
    pub eigenvalues: Array1<T>,
    pub explained_variance_ratio: Array1<T>,
    /// Trace of the covariance.
    pub total_variance: T,
}

impl<T: Real> PcaModel<T> {
    pub fn num_components(&self) -> usize {
        self.components.nrows()
    }
}

pub fn pca_fit<T: Real>(x: &FeatureMatrix<T>, k: usize) -> Result<PcaModel<T>> {
    let (m, d) = (x.nrows(), x.ncols());
    if k == 0 || k > d {
        return Err(Error::Argument(format!("k must be in 1..={d}, got {k}")));
    }
    if m < 2 {
        return Err(Error::Argument(format!("PCA needs at least 2 rows, got {m}")));
    }
    let values = x.values();
    let mean = values.mean_axis(Axis(0)).expect("m >= 2");
    let centered = &values - &mean;
    let cov = centered.t().dot(&centered) / T::from_usize_lossy(m - 1);
    let total_variance: T = cov.diag().sum();
    let eig = symmetric_eigen(cov.view())?;
    let eigenvalues = eig.values.slice(ndarray::s![..k]).mapv(|v| v.max(T::zero()));
    let explained_variance_ratio = if total_variance > T::zero() {
        &eigenvalues / total_variance
    } else {
        Array1::zeros(k)
    };
    let components = eig.vectors.slice(ndarray::s![.., ..k]).t().to_owned();
    Ok(PcaModel {
        mean,
        components,
        eigenvalues,
        explained_variance_ratio,
        total_variance,
    })
}

/// `(X - mean) components^T`.
pub fn pca_transform<T: Real>(model: &PcaModel<T>, x: ArrayView2<'_, T>) -> Result<Array2<T>> {
    if x.ncols() != model.mean.len() {
        return Err(Error::Shape(format!(
            "model fitted on {} columns, got {}",
            model.mean.len(),
            x.ncols()
        )));
    }
    Ok((&x - &model.mean).dot(&model.components.t()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ElbowRule {
    /// Largest drop in `ln(ratio)` between consecutive components, ratios
    /// floored at 1e-12.
    #[default]
    LogDrop,
    /// Farthest point of the cumulative curve from the chord joining its ends.
    Chord,
}

impl fmt::Display for ElbowRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElbowRule::LogDrop => "LOG_DROP",
            ElbowRule::Chord => "CHORD",
        })
    }
}

impl FromStr for ElbowRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LOG_DROP" => Ok(ElbowRule::LogDrop),
            "CHORD" => Ok(ElbowRule::Chord),
            _ => Err(Error::Argument(format!("unknown elbow rule `{s}`"))),
        }
    }
}

const LOG_FLOOR: f64 = 1e-12;

/// Number of components to keep (1-based). Ties go to the smaller index.
pub fn find_elbow<T: Real>(ratios: &[T], rule: ElbowRule) -> Result<usize> {
    if ratios.is_empty() {
        return Err(Error::Argument("no explained-variance ratios".into()));
    }
    if ratios.iter().any(|r| !r.is_finite() || *r < T::zero()) {
        return Err(Error::Argument("ratios must be finite and non-negative".into()));
    }
    if ratios.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Argument("ratios must be sorted descending".into()));
    }
    let n = ratios.len();
    if n == 1 {
        return Ok(1);
    }
    let scores: Vec<T> = match rule {
        ElbowRule::LogDrop => {
            let floor = T::lit(LOG_FLOOR);
            ratios
                .windows(2)
                .map(|w| w[0].max(floor).ln() - w[1].max(floor).ln())
                .collect()
        }
        ElbowRule::Chord => {
            let cumulative: Vec<T> = ratios
                .iter()
                .scan(T::zero(), |acc, r| {
                    *acc += *r;
                    Some(*acc)
                })
                .collect();
            let (x0, y0) = (T::one(), cumulative[0]);
            let (x1, y1) = (T::from_usize_lossy(n), cumulative[n - 1]);
            let (dx, dy) = (x1 - x0, y1 - y0);
            let len = (dx * dx + dy * dy).sqrt();
            cumulative
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let x = T::from_usize_lossy(i + 1);
                    (dy * (x - x0) - dx * (*c - y0)).abs() / len
                })
                .collect()
        }
    };
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    Ok(best + 1)
}
