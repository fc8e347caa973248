use std::collections::BTreeSet;

use ndarray::Array2;

use crate::data::matrix::FeatureMatrix;
use crate::data::table::{Column, RawTable};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Full one-hot encoding (one indicator per observed value, values sorted
/// lexicographically, named `col=value`), followed by the numeric
/// `passthrough` columns unchanged.
pub fn one_hot_encode<T: Real>(
    table: &RawTable,
    categorical: &[&str],
    passthrough: &[&str],
) -> Result<FeatureMatrix<T>> {
    let m = table.row_count();
    let mut blocks: Vec<(String, Vec<T>)> = Vec::new();
    for name in categorical {
        let values = match table.column(name)? {
            Column::Text(v) => v,
            Column::Numeric(_) => {
                return Err(Error::Type(format!("cannot one-hot encode numeric column `{name}`")))
            }
        };
        let categories: BTreeSet<&str> = values.iter().map(String::as_str).collect();
        for cat in categories {
            let indicator = values
                .iter()
                .map(|v| if v == cat { T::one() } else { T::zero() })
                .collect();
            blocks.push((format!("{name}={cat}"), indicator));
        }
    }
    for name in passthrough {
        let values = match table.column(name)? {
            Column::Numeric(v) => v,
            Column::Text(_) => {
                return Err(Error::Type(format!("passthrough column `{name}` is not numeric")))
            }
        };
        let col = values
            .iter()
            .enumerate()
            .map(|(row, v)| {
                v.map(T::lit).ok_or_else(|| Error::Parse {
                    row: row + 1,
                    column: name.to_string(),
                    message: "missing value in passthrough column".into(),
                })
            })
            .collect::<Result<Vec<T>>>()?;
        blocks.push((name.to_string(), col));
    }
    let mut values = Array2::<T>::zeros((m, blocks.len()));
    for (j, (_, col)) in blocks.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            values[[i, j]] = *v;
        }
    }
    FeatureMatrix::new(values, blocks.into_iter().map(|(n, _)| n).collect())
}

/// `+1` where the text column equals `positive`, `-1` elsewhere.
pub fn binary_labels(table: &RawTable, column: &str, positive: &str) -> Result<Vec<i8>> {
    Ok(table
        .text(column)?
        .iter()
        .map(|v| if v == positive { 1 } else { -1 })
        .collect())
}
