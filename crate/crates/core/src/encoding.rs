//! Data-encoding feature maps, trainable ansatz circuits and angle scaling.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::quantum::{Circuit, Gate, MAX_QUBITS};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FeatureMapKind {
    /// `RY(x_i)` per qubit followed by a CZ entangling layer.
    Angle,
    /// Second-order Pauli-Z evolution: Hadamards, `RZ(2 x_i)`, and a
    /// `CX . RZ(2 (pi - x_i)(pi - x_j)) . CX` block per entangled pair.
    Zz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Entanglement {
    Linear,
    Ring,
    Full,
}

impl FeatureMapKind {
    fn name(self) -> &'static str {
        match self {
            FeatureMapKind::Angle => "ANGLE",
            FeatureMapKind::Zz => "ZZ",
        }
    }
}

impl Entanglement {
    fn name(self) -> &'static str {
        match self {
            Entanglement::Linear => "LINEAR",
            Entanglement::Ring => "RING",
            Entanglement::Full => "FULL",
        }
    }

    /// Entangled pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn pairs(self, num_qubits: usize) -> Vec<(usize, usize)> {
        let n = num_qubits;
        let mut pairs: Vec<(usize, usize)> = match self {
            Entanglement::Linear => (1..n).map(|j| (j - 1, j)).collect(),
            Entanglement::Ring => {
                let mut p: Vec<_> = (1..n).map(|j| (j - 1, j)).collect();
                if n > 2 {
                    p.push((0, n - 1));
                }
                p
            }
            Entanglement::Full => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect(),
        };
        pairs.sort_unstable();
        pairs
    }
}

impl FromStr for FeatureMapKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ANGLE" => Ok(FeatureMapKind::Angle),
            "ZZ" => Ok(FeatureMapKind::Zz),
            _ => Err(Error::Argument(format!("unknown feature map kind `{s}`"))),
        }
    }
}

impl FromStr for Entanglement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "LINEAR" => Ok(Entanglement::Linear),
            "RING" => Ok(Entanglement::Ring),
            "FULL" => Ok(Entanglement::Full),
            _ => Err(Error::Argument(format!("unknown entanglement `{s}`"))),
        }
    }
}

/// Shape of a data-encoding circuit; one qubit per feature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FeatureMapSpec {
    pub kind: FeatureMapKind,
    pub num_features: usize,
    pub reps: usize,
    pub entanglement: Entanglement,
}

impl FeatureMapSpec {
    pub fn new(
        kind: FeatureMapKind,
        num_features: usize,
        reps: usize,
        entanglement: Entanglement,
    ) -> Result<Self> {
        let spec = FeatureMapSpec {
            kind,
            num_features,
            reps,
            entanglement,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Default encoding: ZZ, two repetitions, linear entanglement.
    pub fn zz(num_features: usize) -> Result<Self> {
        Self::new(FeatureMapKind::Zz, num_features, 2, Entanglement::Linear)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_features == 0 || self.num_features > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "{} features; feature maps use 1 to {MAX_QUBITS} qubits",
                self.num_features
            )));
        }
        if self.reps == 0 {
            return Err(Error::Argument("feature map needs reps >= 1".into()));
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_features
    }
}

impl fmt::Display for FeatureMapSpec {
    /// `kind=ZZ reps=2 ent=LINEAR nq=10`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "kind={} reps={} ent={} nq={}",
            self.kind.name(),
            self.reps,
            self.entanglement.name(),
            self.num_features
        )
    }
}

impl FromStr for FeatureMapSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut kind = None;
        let mut reps = None;
        let mut ent = None;
        let mut nq = None;
        for field in s.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Argument(format!("descriptor field `{field}` lacks `=`")))?;
            let bad = |e: std::num::ParseIntError| Error::Argument(format!("`{field}`: {e}"));
            match key {
                "kind" => kind = Some(value.parse()?),
                "reps" => reps = Some(value.parse().map_err(bad)?),
                "ent" => ent = Some(value.parse()?),
                "nq" => nq = Some(value.parse().map_err(bad)?),
                _ => return Err(Error::Argument(format!("unknown descriptor key `{key}`"))),
            }
        }
        let missing = |k: &str| Error::Argument(format!("descriptor lacks `{k}`"));
        FeatureMapSpec::new(
            kind.ok_or_else(|| missing("kind"))?,
            nq.ok_or_else(|| missing("nq"))?,
            reps.ok_or_else(|| missing("reps"))?,
            ent.ok_or_else(|| missing("ent"))?,
        )
    }
}

/// Encoding circuit for one sample.
pub fn build_feature_map<T: Real>(spec: &FeatureMapSpec, x: &[T]) -> Result<Circuit<T>> {
    spec.validate()?;
    let n = spec.num_features;
    if x.len() != n {
        return Err(Error::Shape(format!(
            "feature map expects {n} features, got {}",
            x.len()
        )));
    }
    let pairs = spec.entanglement.pairs(n);
    let two = T::lit(2.0);
    let pi = T::PI();
    let mut c = Circuit::new(n)?;
    for _ in 0..spec.reps {
        match spec.kind {
            FeatureMapKind::Angle => {
                for (q, &v) in x.iter().enumerate() {
                    c.push(Gate::Ry(q, v))?;
                }
                for &(i, j) in &pairs {
                    c.push(Gate::Cz(i, j))?;
                }
            }
            FeatureMapKind::Zz => {
                for q in 0..n {
                    c.push(Gate::H(q))?;
                }
                for (q, &v) in x.iter().enumerate() {
                    c.push(Gate::Rz(q, two * v))?;
                }
                for &(i, j) in &pairs {
                    let phi = two * (pi - x[i]) * (pi - x[j]);
                    c.push(Gate::Cx {
                        control: i,
                        target: j,
                    })?;
                    c.push(Gate::Rz(j, phi))?;
                    c.push(Gate::Cx {
                        control: i,
                        target: j,
                    })?;
                }
            }
        }
    }
    Ok(c)
}

/// Hardware-efficient trainable layers: `RY` on every qubit, then a CZ ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AnsatzSpec {
    pub num_qubits: usize,
    pub layers: usize,
}

impl AnsatzSpec {
    pub fn new(num_qubits: usize, layers: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!("ansatz width {num_qubits}")));
        }
        if layers == 0 {
            return Err(Error::Argument("ansatz needs at least one layer".into()));
        }
        Ok(AnsatzSpec { num_qubits, layers })
    }

    pub fn param_count(&self) -> usize {
        self.num_qubits * self.layers
    }
}

/// Ansatz circuit consuming `params` in order, one per `RY`.
pub fn build_ansatz<T: Real>(spec: &AnsatzSpec, params: &[T]) -> Result<Circuit<T>> {
    if params.len() != spec.param_count() {
        return Err(Error::Shape(format!(
            "ansatz takes {} parameters, got {}",
            spec.param_count(),
            params.len()
        )));
    }
    let n = spec.num_qubits;
    let ring = Entanglement::Ring.pairs(n);
    let mut c = Circuit::new(n)?;
    for layer in params.chunks(n) {
        for (q, &theta) in layer.iter().enumerate() {
            c.push(Gate::Ry(q, theta))?;
        }
        for &(i, j) in &ring {
            c.push(Gate::Cz(i, j))?;
        }
    }
    Ok(c)
}

/// Per-column min-max map fitted on one matrix and applied to others.
#[derive(Clone, Debug, PartialEq)]
pub struct MinMaxScaler<T> {
    pub min: Array1<T>,
    pub max: Array1<T>,
    pub low: T,
    pub high: T,
}

impl<T: Real> MinMaxScaler<T> {
    pub fn fit(matrix: &FeatureMatrix<T>, low: T, high: T) -> Result<Self> {
        if !(high > low) {
            return Err(Error::Argument(format!(
                "scaling range needs high > low, got [{low}, {high}]"
            )));
        }
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::Shape("cannot scale an empty matrix".into()));
        }
        let v = matrix.values();
        let min = v.fold_axis(Axis(0), T::infinity(), |&a, &b| a.min(b));
        let max = v.fold_axis(Axis(0), T::neg_infinity(), |&a, &b| a.max(b));
        Ok(MinMaxScaler {
            min,
            max,
            low,
            high,
        })
    }

    /// Applies the fitted map. Values outside the fitted range extrapolate
    /// linearly; constant fitted columns map to `low`.
    pub fn transform(&self, matrix: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
        if matrix.ncols() != self.min.len() {
            return Err(Error::Shape(format!(
                "scaler fitted on {} columns, got {}",
                self.min.len(),
                matrix.ncols()
            )));
        }
        let span = self.high - self.low;
        let mut out = Array2::zeros((matrix.nrows(), matrix.ncols()));
        for ((r, c), v) in matrix.values().indexed_iter() {
            let range = self.max[c] - self.min[c];
            out[[r, c]] = if range > T::zero() {
                self.low + (*v - self.min[c]) / range * span
            } else {
                self.low
            };
        }
        FeatureMatrix::new(out, matrix.column_names().to_vec())
    }
}

/// Min-max scales each column of `matrix` to `[low, high]`.
pub fn scale_features<T: Real>(matrix: &FeatureMatrix<T>, low: T, high: T) -> Result<FeatureMatrix<T>> {
    MinMaxScaler::fit(matrix, low, high)?.transform(matrix)
}
