//! Dense-unitary reference construction, for testing the statevector kernels.
//!
//! Each gate is lifted to the full `2^n x 2^n` space by Kronecker products of
//! 2x2 factors (controlled gates as sums of projector products), then the
//! circuit unitary is the ordered matrix product. None of the index-bit
//! arithmetic of [`StateVector`](super::StateVector) is reused.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quantum::circuit::Circuit;
use crate::quantum::gate::{Gate, GateMatrix};
use crate::scalar::Real;

/// Widest circuit the oracle will expand.
pub const ORACLE_MAX_QUBITS: usize = 10;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        CMatrix { dim, data }
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        CMatrix {
            dim,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.dim + c]
    }

    /// `self ⊗ other`; `self` acts on the more significant bits.
    pub fn kron(&self, other: &CMatrix<T>) -> CMatrix<T> {
        let dim = self.dim * other.dim;
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for ar in 0..self.dim {
            for ac in 0..self.dim {
                let a = self.get(ar, ac);
                for br in 0..other.dim {
                    for bc in 0..other.dim {
                        data[(ar * other.dim + br) * dim + ac * other.dim + bc] = a * other.get(br, bc);
                    }
                }
            }
        }
        CMatrix { dim, data }
    }

    pub fn matmul(&self, other: &CMatrix<T>) -> CMatrix<T> {
        let n = self.dim;
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for c in 0..n {
                    data[r * n + c] = data[r * n + c] + a * other.data[k * n + c];
                }
            }
        }
        CMatrix { dim: n, data }
    }

    pub fn add(&self, other: &CMatrix<T>) -> CMatrix<T> {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> CMatrix<T> {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn adjoint(&self) -> CMatrix<T> {
        let n = self.dim;
        let mut data = self.data.clone();
        for r in 0..n {
            for c in 0..n {
                data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        CMatrix { dim: n, data }
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.dim)
            .map(|r| {
                (0..self.dim)
                    .map(|c| self.data[r * self.dim + c] * v[c])
                    .sum()
            })
            .collect()
    }

    /// Largest `|(U^dagger U - I)_{rc}|`.
    pub fn unitarity_error(&self) -> T {
        let prod = self.adjoint().matmul(self);
        let id = CMatrix::identity(self.dim);
        prod.data
            .iter()
            .zip(&id.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }
}

fn c<T: Real>(re: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::zero())
}

fn projector<T: Real>(bit: usize) -> CMatrix<T> {
    let mut m = CMatrix::identity(2);
    m.data[(1 - bit) * 3] = c(0.0);
    m
}

/// Kronecker product over all qubits, `factor(q)` placed on qubit `q`.
fn lift<T: Real>(num_qubits: usize, factor: impl Fn(usize) -> CMatrix<T>) -> CMatrix<T> {
    (0..num_qubits)
        .rev()
        .map(factor)
        .reduce(|acc, f| acc.kron(&f))
        .expect("at least one qubit")
}

fn gate_unitary<T: Real>(num_qubits: usize, gate: &Gate<T>) -> CMatrix<T> {
    let id = || CMatrix::identity(2);
    match *gate {
        Gate::Cx { control, target } => {
            let x = CMatrix::from_rows(&[vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]);
            let off = lift(num_qubits, |q| if q == control { projector(0) } else { id() });
            let on = lift(num_qubits, |q| {
                if q == control {
                    projector(1)
                } else if q == target {
                    x.clone()
                } else {
                    id()
                }
            });
            off.add(&on)
        }
        Gate::Cz(a, b) => {
            let both = lift(num_qubits, |q| if q == a || q == b { projector(1) } else { id() });
            CMatrix::identity(1 << num_qubits).add(&both.scale(c(-2.0)))
        }
        _ => {
            let GateMatrix::Single(m) = gate.matrix() else {
                unreachable!("only CX and CZ are two-qubit kinds")
            };
            let u = CMatrix::from_rows(&[m[0].to_vec(), m[1].to_vec()]);
            let target = gate.qubits()[0];
            lift(num_qubits, |q| if q == target { u.clone() } else { id() })
        }
    }
}

/// Full unitary of `circuit` (later gates multiply on the left).
pub fn dense_unitary<T: Real>(circuit: &Circuit<T>) -> Result<CMatrix<T>> {
    let n = circuit.num_qubits();
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "dense oracle limited to {ORACLE_MAX_QUBITS} qubits, circuit has {n}"
        )));
    }
    Ok(circuit
        .gates()
        .iter()
        .fold(CMatrix::identity(1 << n), |acc, g| gate_unitary(n, g).matmul(&acc)))
}
