use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::quantum::circuit::Circuit;
use crate::quantum::gate::{Gate, GateMatrix};
use crate::quantum::MAX_QUBITS;
use crate::rng;
use crate::scalar::{fmt_exact, Real};

/// Dense amplitude register of `num_qubits` qubits (little-endian: qubit 0 is
/// the least significant bit of the basis index).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    num_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

/// Shot histogram keyed by bitstring, most significant qubit leftmost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub num_qubits: usize,
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
}

impl MeasurementRecord {
    pub fn count(&self, bitstring: &str) -> u64 {
        self.counts.get(bitstring).copied().unwrap_or(0)
    }

    pub fn frequency(&self, bitstring: &str) -> f64 {
        self.count(bitstring) as f64 / self.shots as f64
    }
}

/// Basis index rendered as an `n`-character bitstring, qubit `n-1` first.
pub fn bitstring(index: usize, num_qubits: usize) -> String {
    (0..num_qubits)
        .rev()
        .map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn check_width(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "{num_qubits} qubits requested; the simulator holds 1 to {MAX_QUBITS}"
        )));
    }
    Ok(())
}

impl<T: Real> StateVector<T> {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn ground_state(num_qubits: usize) -> Result<Self> {
        check_width(num_qubits)?;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << num_qubits];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps amplitudes after checking the length is a power of two and the
    /// squared norm is 1.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let s = Self::from_raw(amplitudes)?;
        s.check_normalized()?;
        Ok(s)
    }

    /// Wraps amplitudes checking only the length. The result may be
    /// unnormalized; Born-rule operations will reject it.
    pub fn from_raw(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Shape(format!(
                "amplitude count {len} is not 2^n with n >= 1"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_width(num_qubits)?;
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index>`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::ground_state(num_qubits)?;
        if index >= s.dim() {
            return Err(Error::Index(format!(
                "basis index {index} on {num_qubits} qubits"
            )));
        }
        s.amplitudes[0] = Complex::new(T::zero(), T::zero());
        s.amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - T::one()).abs() > T::norm_tolerance() {
            return Err(Error::Normalization {
                norm_sqr: n.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Applies one gate and returns the new state.
    pub fn apply_gate(mut self, gate: &Gate<T>) -> Result<Self> {
        self.apply_gate_in_place(gate)?;
        Ok(self)
    }

    pub fn apply_gate_in_place(&mut self, gate: &Gate<T>) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match *gate {
            Gate::X(q) => self.apply_x(q),
            Gate::Cx { control, target } => self.apply_cx(control, target),
            Gate::Z(q) | Gate::S(q) | Gate::Rz(q, _) | Gate::Phase(q, _) => {
                let GateMatrix::Single(m) = gate.matrix() else {
                    unreachable!()
                };
                self.apply_diagonal(q, m[0][0], m[1][1]);
            }
            Gate::Cz(a, b) => self.apply_cz(a, b),
            _ => match gate.matrix() {
                GateMatrix::Single(m) => self.apply_single(gate.qubits()[0], &m),
                GateMatrix::Two(m) => {
                    let qs = gate.qubits();
                    self.apply_two(qs[0], qs[1], &m)
                }
            },
        }
        Ok(())
    }

    /// Applies the circuit's gates in order.
    pub fn apply_circuit(mut self, circuit: &Circuit<T>) -> Result<Self> {
        self.apply_circuit_in_place(circuit)?;
        Ok(self)
    }

    pub fn apply_circuit_in_place(&mut self, circuit: &Circuit<T>) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::Shape(format!(
                "{}-qubit circuit applied to a {}-qubit state",
                circuit.num_qubits(),
                self.num_qubits
            )));
        }
        for g in circuit.gates() {
            self.apply_gate_in_place(g)?;
        }
        Ok(())
    }

    fn apply_single(&mut self, q: usize, m: &[[Complex<T>; 2]; 2]) {
        let stride = 1usize << q;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x0, x1) = (*a0, *a1);
                *a0 = m[0][0] * x0 + m[0][1] * x1;
                *a1 = m[1][0] * x0 + m[1][1] * x1;
            }
        }
    }

    fn apply_diagonal(&mut self, q: usize, d0: Complex<T>, d1: Complex<T>) {
        let stride = 1usize << q;
        let one = Complex::new(T::one(), T::zero());
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            if d0 != one {
                lo.iter_mut().for_each(|a| *a = *a * d0);
            }
            hi.iter_mut().for_each(|a| *a = *a * d1);
        }
    }

    fn apply_x(&mut self, q: usize) {
        let stride = 1usize << q;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            lo.swap_with_slice(hi);
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let (cm, tm) = (1usize << control, 1usize << target);
        for i in 0..self.amplitudes.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amplitudes.swap(i, i | tm);
            }
        }
    }

    fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    fn apply_two(&mut self, q0: usize, q1: usize, m: &[[Complex<T>; 4]; 4]) {
        let (m0, m1) = (1usize << q0, 1usize << q1);
        for i in 0..self.amplitudes.len() {
            if i & (m0 | m1) != 0 {
                continue;
            }
            let idx = [i, i | m0, i | m1, i | m0 | m1];
            let x = idx.map(|k| self.amplitudes[k]);
            for (r, &k) in idx.iter().enumerate() {
                self.amplitudes[k] = (0..4).map(|c| m[r][c] * x[c]).sum();
            }
        }
    }

    /// Born-rule outcome probabilities, `|amplitude_i|^2`.
    pub fn probabilities(&self) -> Result<Vec<T>> {
        self.check_normalized()?;
        Ok(self.amplitudes.iter().map(|a| a.norm_sqr()).collect())
    }

    /// Draws `shots` i.i.d. computational-basis outcomes.
    pub fn sample_counts(&self, shots: u64, seed: u64) -> Result<MeasurementRecord> {
        if shots == 0 {
            return Err(Error::Argument("shots must be positive".into()));
        }
        let probs = self.probabilities()?;
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0f64;
        for p in &probs {
            acc += p.to_f64_lossy();
            cumulative.push(acc);
        }
        let total = acc;
        let last = probs.len() - 1;
        let mut rng = rng::seeded(seed);
        let mut hits = BTreeMap::<usize, u64>::new();
        for _ in 0..shots {
            let r: f64 = rng.random::<f64>() * total;
            let idx = cumulative.partition_point(|&c| c <= r).min(last);
            *hits.entry(idx).or_default() += 1;
        }
        Ok(MeasurementRecord {
            num_qubits: self.num_qubits,
            counts: hits
                .into_iter()
                .map(|(i, c)| (bitstring(i, self.num_qubits), c))
                .collect(),
            shots,
            seed,
        })
    }

    /// `<self|other>`.
    pub fn inner_product(&self, other: &StateVector<T>) -> Result<Complex<T>> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Shape(format!(
                "inner product of {}- and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `<Z>` on one qubit, in [-1, 1].
    pub fn expectation_z(&self, qubit: usize) -> Result<T> {
        if qubit >= self.num_qubits {
            return Err(Error::Index(format!(
                "qubit {qubit} on a {}-qubit state",
                self.num_qubits
            )));
        }
        self.check_normalized()?;
        let mask = 1usize << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if i & mask == 0 {
                    a.norm_sqr()
                } else {
                    -a.norm_sqr()
                }
            })
            .sum())
    }

    /// Debug dump: one `bitstring real imag` line per basis state.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amplitudes.iter().enumerate() {
            out.push_str(&bitstring(i, self.num_qubits));
            out.push(' ');
            out.push_str(&fmt_exact(a.re));
            out.push(' ');
            out.push_str(&fmt_exact(a.im));
            out.push('\n');
        }
        out
    }
}
