//! Classical learners and metrics.

pub mod logistic;
pub mod regression;
pub mod svm;

pub use logistic::{fit_logistic, logistic_cost, logistic_gradient, sigmoid, LogisticModel};
pub use regression::{
    fit_linear, linear_cost, linear_cost_gradient, regression_metrics, LinearModel, Penalty, RegMetrics,
};
pub use svm::{
    dual_objective, load_model, model_to_string, parse_model, rbf_gamma_scale, save_model, svm_fit,
    svm_fit_with, svm_predict, SmoOptions, SmoReport, SvmKernel, SvmModel,
};

use crate::error::{Error, Result};

/// Fraction of positions where `predicted == truth`.
pub fn accuracy<L: PartialEq>(predicted: &[L], truth: &[L]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::Shape("accuracy of an empty set".into()));
    }
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}
