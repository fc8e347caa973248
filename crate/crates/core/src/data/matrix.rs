use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real design matrix with named columns. All values are finite.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix<T> {
    values: Array2<T>,
    column_names: Vec<String>,
}

impl<T: Real> FeatureMatrix<T> {
    pub fn new(values: Array2<T>, column_names: Vec<String>) -> Result<Self> {
        if column_names.len() != values.ncols() {
            return Err(Error::Shape(format!(
                "{} column names for {} columns",
                column_names.len(),
                values.ncols()
            )));
        }
        if let Some(((r, c), _)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Argument(format!(
                "non-finite value at row {r}, column `{}`",
                column_names[c]
            )));
        }
        Ok(FeatureMatrix {
            values,
            column_names,
        })
    }

    /// Columns named `x0, x1, ...`.
    pub fn unnamed(values: Array2<T>) -> Result<Self> {
        let names = (0..values.ncols()).map(|j| format!("x{j}")).collect();
        Self::new(values, names)
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let values = Array2::from_shape_vec(
            (rows.len(), ncols),
            rows.iter().flatten().copied().collect(),
        )
        .map_err(|e| Error::Shape(e.to_string()))?;
        Self::unnamed(values)
    }

    pub fn values(&self) -> ArrayView2<'_, T> {
        self.values.view()
    }

    pub fn into_values(self) -> Array2<T> {
        self.values
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, T> {
        self.values.row(i)
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, T> {
        self.values.column(j)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|n| n == name)
    }

    /// Rows at `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix<T> {
        FeatureMatrix {
            values: self.values.select(Axis(0), indices),
            column_names: self.column_names.clone(),
        }
    }

    pub fn select_columns(&self, indices: &[usize]) -> FeatureMatrix<T> {
        FeatureMatrix {
            values: self.values.select(Axis(1), indices),
            column_names: indices.iter().map(|&j| self.column_names[j].clone()).collect(),
        }
    }
}
