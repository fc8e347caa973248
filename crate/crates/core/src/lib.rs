//! Statevector quantum simulation, fidelity kernels and a classical ML core,
//! wired into a reproducible churn-classification experiment.
//!
//! The numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the experiment uses.

pub mod data;
pub mod encoding;
pub mod error;
pub mod experiment;
pub mod kernel;
pub mod linalg;
pub mod ml;
pub mod quantum;
pub mod rng;
pub mod scalar;
pub mod variational;

pub use error::{Error, Result};
pub use scalar::Real;

pub type StateVector64 = quantum::StateVector<f64>;
pub type Circuit64 = quantum::Circuit<f64>;
pub type Gate64 = quantum::Gate<f64>;
pub type KernelMatrix64 = kernel::KernelMatrix<f64>;
pub type FeatureMatrix64 = data::FeatureMatrix<f64>;

pub type StateVector32 = quantum::StateVector<f32>;
pub type Circuit32 = quantum::Circuit<f32>;
