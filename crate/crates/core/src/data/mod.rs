//! Tabular ingest, statistics, encoding, sampling and PCA.

mod encode;
mod matrix;
mod pca;
mod sampling;
mod stats;
mod table;

pub use encode::{binary_labels, one_hot_encode};
pub use matrix::FeatureMatrix;
pub use pca::{find_elbow, pca_fit, pca_transform, ElbowRule, PcaModel};
pub use sampling::{stratified_sample, train_test_split, undersample_indices, SplitIndices};
pub use stats::{label_encode, pearson_correlation, vif, VifMode};
pub use table::{load_churn_csv, read_churn_csv, Column, RawTable, CHURN_COLUMNS, CHURN_NUMERIC};

use crate::error::Result;
use crate::scalar::Real;

/// Keeps every minority row and an equal random share of the majority.
pub fn undersample<T: Real>(
    x: &FeatureMatrix<T>,
    y: &[i8],
    seed: u64,
) -> Result<(FeatureMatrix<T>, Vec<i8>)> {
    if x.nrows() != y.len() {
        return Err(crate::Error::Shape(format!(
            "{} rows but {} labels",
            x.nrows(),
            y.len()
        )));
    }
    let keep = undersample_indices(y, seed)?;
    Ok((x.select_rows(&keep), keep.iter().map(|&i| y[i]).collect()))
}
