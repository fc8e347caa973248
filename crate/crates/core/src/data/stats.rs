use std::collections::BTreeMap;

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::data::matrix::FeatureMatrix;
use crate::data::table::{Column, RawTable};
use crate::error::{Error, Result};
use crate::linalg::projection_residual;
use crate::scalar::Real;

/// Pearson correlation over pairwise-complete observations.
pub fn pearson_correlation<T: Real>(a: &[Option<T>], b: &[Option<T>]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!("columns of length {} and {}", a.len(), b.len())));
    }
    let pairs: Vec<(T, T)> = a
        .iter()
        .zip(b)
        .filter_map(|(x, y)| match (x, y) {
            (Some(x), Some(y)) if x.is_finite() && y.is_finite() => Some((*x, *y)),
            _ => None,
        })
        .collect();
    if pairs.len() < 2 {
        return Err(Error::UndefinedCorrelation(format!(
            "{} complete pairs, need at least 2",
            pairs.len()
        )));
    }
    let n = T::from_usize_lossy(pairs.len());
    let mx = pairs.iter().map(|p| p.0).sum::<T>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (x, y) in &pairs {
        let (dx, dy) = (*x - mx, *y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).max(-T::one()).min(T::one()))
}

/// How the auxiliary regressions behind [`vif`] are set up.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum VifMode {
    /// Regress on the other columns plus an intercept; centered R-squared.
    #[default]
    Centered,
    /// No intercept; R-squared against the raw sum of squares.
    Uncentered,
}

/// Variance inflation factor `1 / (1 - R^2_j)` per column. Columns with
/// `R^2_j >= 1 - 1e-12` (including constant columns in centered mode) get
/// `+inf`.
pub fn vif<T: Real>(x: &FeatureMatrix<T>, mode: VifMode) -> Result<Vec<T>> {
    let (m, d) = (x.nrows(), x.ncols());
    if d < 2 {
        return Err(Error::Argument(format!("VIF needs at least 2 columns, got {d}")));
    }
    if m <= d {
        return Err(Error::Underdetermined { rows: m, cols: d });
    }
    let values = x.values();
    let cutoff = T::one() - T::lit(1e-12);
    (0..d)
        .map(|j| {
            let target = values.column(j);
            let others: Vec<usize> = (0..d).filter(|&k| k != j).collect();
            let mut design = values.select(Axis(1), &others);
            if mode == VifMode::Centered {
                let ones = Array2::ones((m, 1));
                design = ndarray::concatenate![Axis(1), ones, design];
            }
            let r = projection_residual(design.view(), target)?;
            let ss_res = r.dot(&r);
            let ss_tot = match mode {
                VifMode::Centered => {
                    let mean = target.sum() / T::from_usize_lossy(m);
                    target.iter().map(|v| (*v - mean) * (*v - mean)).sum::<T>()
                }
                VifMode::Uncentered => target.dot(&target),
            };
            if ss_tot == T::zero() {
                return Ok(T::infinity());
            }
            let r2 = T::one() - ss_res / ss_tot;
            Ok(if r2 >= cutoff { T::infinity() } else { T::one() / (T::one() - r2) })
        })
        .collect()
}

/// Numeric matrix with text columns replaced by the rank of their value in
/// the sorted set of distinct values. Missing numeric cells are an error.
pub fn label_encode<T: Real>(table: &RawTable, columns: &[&str]) -> Result<FeatureMatrix<T>> {
    let m = table.row_count();
    let mut values = Array2::<T>::zeros((m, columns.len()));
    for (j, name) in columns.iter().enumerate() {
        let col: Array1<T> = match table.column(name)? {
            Column::Numeric(v) => v
                .iter()
                .enumerate()
                .map(|(row, c)| {
                    c.map(T::lit).ok_or_else(|| Error::Parse {
                        row: row + 1,
                        column: name.to_string(),
                        message: "missing value".into(),
                    })
                })
                .collect::<Result<_>>()?,
            Column::Text(v) => {
                let codes: BTreeMap<&str, usize> = v
                    .iter()
                    .map(String::as_str)
                    .collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| (s, i))
                    .collect();
                v.iter().map(|s| T::from_usize_lossy(codes[s.as_str()])).collect()
            }
        };
        values.column_mut(j).assign(&col);
    }
    FeatureMatrix::new(values, columns.iter().map(|s| s.to_string()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn correlation_examples() {
        let x = [Some(1.0f64), Some(2.0), None, Some(4.0), Some(7.0)];
        let neg: Vec<_> = x.iter().map(|v| v.map(|a| -a)).collect();
        assert!((pearson_correlation(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson_correlation(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        let flat = [Some(3.0f64); 5];
        assert!(matches!(pearson_correlation(&x, &flat), Err(Error::UndefinedCorrelation(_))));
    }

    #[test]
    fn vif_duplicate_column_is_infinite() {
        let x = FeatureMatrix::unnamed(array![
            [1.0f64, 1.0, 0.3],
            [2.0, 2.0, -1.0],
            [3.0, 3.0, 0.5],
            [5.0, 5.0, 2.0],
            [4.0, 4.0, 0.0]
        ])
        .unwrap();
        let v = vif(&x, VifMode::Centered).unwrap();
        assert!(v[0].is_infinite() && v[1].is_infinite() && v[2].is_finite());
    }

    #[test]
    fn vif_needs_rows() {
        let x = FeatureMatrix::unnamed(array![[1.0f64, 2.0], [3.0, 1.0]]).unwrap();
        assert!(matches!(
            vif(&x, VifMode::Centered),
            Err(Error::Underdetermined { rows: 2, cols: 2 })
        ));
    }

    #[test]
    fn label_codes_are_sorted() {
        let t = RawTable::new(
            vec!["a".into(), "n".into()],
            vec![
                Column::Text(vec!["Yes".into(), "No".into(), "Maybe".into()]),
                Column::Numeric(vec![Some(1.5), Some(2.0), Some(0.0)]),
            ],
        )
        .unwrap();
        let m = label_encode::<f64>(&t, &["a", "n"]).unwrap();
        assert_eq!(m.column(0).to_vec(), vec![2.0, 1.0, 0.0]);
        assert_eq!(m.column(1).to_vec(), vec![1.5, 2.0, 0.0]);
    }
}
