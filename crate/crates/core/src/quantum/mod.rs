//! Dense statevector simulation.
//!
//! Qubit ordering is little-endian throughout: qubit 0 is the least
//! significant bit of a basis-state index, and bitstrings print the most
//! significant qubit first.

mod circuit;
mod gate;
pub mod oracle;
mod state;

pub use circuit::Circuit;
pub use gate::{Gate, GateKind, GateMatrix};
pub use oracle::{dense_unitary, CMatrix};
pub use state::{bitstring, MeasurementRecord, StateVector};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;
