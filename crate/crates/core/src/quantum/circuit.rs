use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quantum::gate::Gate;
use crate::quantum::MAX_QUBITS;
use crate::scalar::Real;

/// Ordered gate list over a fixed register width.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    num_qubits: usize,
    gates: Vec<Gate<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "circuit width {num_qubits} outside [1, {MAX_QUBITS}]"
            )));
        }
        Ok(Circuit {
            num_qubits,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(num_qubits: usize, gates: impl IntoIterator<Item = Gate<T>>) -> Result<Self> {
        let mut c = Circuit::new(num_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<&mut Self> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    /// Appends `other` after `self`. Sub-circuits (oracles, encoders) compose this way.
    pub fn append(&mut self, other: &Circuit<T>) -> Result<&mut Self> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::Shape(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.num_qubits, self.num_qubits
            )));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(self)
    }

    /// Inverse circuit: gates reversed, each replaced by its adjoint.
    pub fn adjoint(&self) -> Self {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }
}

impl<T: Real> fmt::Display for Circuit<T> {
    /// One gate per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl<T: Real + FromStr> Circuit<T> {
    /// Parses the one-gate-per-line debug format. Blank lines are skipped.
    pub fn parse(num_qubits: usize, text: &str) -> Result<Self> {
        let mut c = Circuit::new(num_qubits)?;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let g: Gate<T> = line.parse().map_err(|e: Error| Error::Format {
                line: i + 1,
                message: e.to_string(),
            })?;
            c.push(g).map_err(|e| Error::Format {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(c)
    }
}
