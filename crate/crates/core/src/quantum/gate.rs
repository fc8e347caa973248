use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{fmt_exact, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Rx,
    Ry,
    Rz,
    Phase,
    Cx,
    Cz,
}

impl GateKind {
    pub const ALL: [GateKind; 11] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Phase,
        GateKind::Cx,
        GateKind::Cz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Phase => "PHASE",
            GateKind::Cx => "CX",
            GateKind::Cz => "CZ",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cx | GateKind::Cz => 2,
            _ => 1,
        }
    }

    pub fn is_parameterized(self) -> bool {
        matches!(
            self,
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Phase
        )
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown gate kind `{s}`")))
    }
}

/// A single gate application.
///
/// Qubit 0 is the least significant bit of a basis-state index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate<T> {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    S(usize),
    Rx(usize, T),
    Ry(usize, T),
    Rz(usize, T),
    Phase(usize, T),
    Cx { control: usize, target: usize },
    Cz(usize, usize),
}

/// Matrix of a gate in its local basis.
///
/// For two-qubit gates the local index is `bit(q0) + 2 * bit(q1)` where
/// `[q0, q1]` is the order returned by [`Gate::qubits`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateMatrix<T> {
    Single([[Complex<T>; 2]; 2]),
    Two([[Complex<T>; 4]; 4]),
}

impl<T: Real> Gate<T> {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::X(_) => GateKind::X,
            Gate::Y(_) => GateKind::Y,
            Gate::Z(_) => GateKind::Z,
            Gate::S(_) => GateKind::S,
            Gate::Rx(..) => GateKind::Rx,
            Gate::Ry(..) => GateKind::Ry,
            Gate::Rz(..) => GateKind::Rz,
            Gate::Phase(..) => GateKind::Phase,
            Gate::Cx { .. } => GateKind::Cx,
            Gate::Cz(..) => GateKind::Cz,
        }
    }

    /// Qubits the gate acts on; for CX the control comes first.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q)
            | Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q)
            | Gate::S(q)
            | Gate::Rx(q, _)
            | Gate::Ry(q, _)
            | Gate::Rz(q, _)
            | Gate::Phase(q, _) => vec![q],
            Gate::Cx { control, target } => vec![control, target],
            Gate::Cz(a, b) => vec![a, b],
        }
    }

    pub fn angle(&self) -> Option<T> {
        match *self {
            Gate::Rx(_, t) | Gate::Ry(_, t) | Gate::Rz(_, t) | Gate::Phase(_, t) => Some(t),
            _ => None,
        }
    }

    /// Builds a gate from its kind, qubit list and optional angle.
    pub fn from_parts(kind: GateKind, qubits: &[usize], angle: Option<T>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::Argument(format!(
                "{} takes {} qubit(s), got {}",
                kind.name(),
                kind.arity(),
                qubits.len()
            )));
        }
        let need_angle = kind.is_parameterized();
        let theta = match (need_angle, angle) {
            (true, Some(t)) => t,
            (false, None) => T::zero(),
            (true, None) => {
                return Err(Error::Argument(format!("{} needs an angle", kind.name())))
            }
            (false, Some(_)) => {
                return Err(Error::Argument(format!("{} takes no angle", kind.name())))
            }
        };
        let q = qubits[0];
        Ok(match kind {
            GateKind::H => Gate::H(q),
            GateKind::X => Gate::X(q),
            GateKind::Y => Gate::Y(q),
            GateKind::Z => Gate::Z(q),
            GateKind::S => Gate::S(q),
            GateKind::Rx => Gate::Rx(q, theta),
            GateKind::Ry => Gate::Ry(q, theta),
            GateKind::Rz => Gate::Rz(q, theta),
            GateKind::Phase => Gate::Phase(q, theta),
            GateKind::Cx => Gate::Cx {
                control: q,
                target: qubits[1],
            },
            GateKind::Cz => Gate::Cz(q, qubits[1]),
        })
    }

    /// Checks that targets are distinct and below `num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&bad) = qs.iter().find(|&&q| q >= num_qubits) {
            return Err(Error::Index(format!(
                "{} targets qubit {bad} on a {num_qubits}-qubit register",
                self.kind().name()
            )));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Index(format!(
                "{} needs two distinct qubits, got {} twice",
                self.kind().name(),
                qs[0]
            )));
        }
        Ok(())
    }

    /// The inverse gate. `S` maps to `PHASE(-pi/2)` to stay inside the gate set.
    pub fn adjoint(&self) -> Self {
        match *self {
            Gate::S(q) => Gate::Phase(q, -T::FRAC_PI_2()),
            Gate::Rx(q, t) => Gate::Rx(q, -t),
            Gate::Ry(q, t) => Gate::Ry(q, -t),
            Gate::Rz(q, t) => Gate::Rz(q, -t),
            Gate::Phase(q, t) => Gate::Phase(q, -t),
            g => g,
        }
    }

    pub fn matrix(&self) -> GateMatrix<T> {
        let z = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        let half = T::lit(0.5);
        match *self {
            Gate::H(_) => {
                let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
                GateMatrix::Single([[h, h], [h, -h]])
            }
            Gate::X(_) => GateMatrix::Single([[z, one], [one, z]]),
            Gate::Y(_) => GateMatrix::Single([[z, -i], [i, z]]),
            Gate::Z(_) => GateMatrix::Single([[one, z], [z, -one]]),
            Gate::S(_) => GateMatrix::Single([[one, z], [z, i]]),
            Gate::Rx(_, t) => {
                let (s, c) = (t * half).sin_cos();
                let c = Complex::new(c, T::zero());
                let ms = Complex::new(T::zero(), -s);
                GateMatrix::Single([[c, ms], [ms, c]])
            }
            Gate::Ry(_, t) => {
                let (s, c) = (t * half).sin_cos();
                GateMatrix::Single([
                    [Complex::new(c, T::zero()), Complex::new(-s, T::zero())],
                    [Complex::new(s, T::zero()), Complex::new(c, T::zero())],
                ])
            }
            Gate::Rz(_, t) => {
                let (s, c) = (t * half).sin_cos();
                GateMatrix::Single([[Complex::new(c, -s), z], [z, Complex::new(c, s)]])
            }
            Gate::Phase(_, t) => {
                let (s, c) = t.sin_cos();
                GateMatrix::Single([[one, z], [z, Complex::new(c, s)]])
            }
            Gate::Cx { .. } => {
                // local index = bit(control) + 2 * bit(target)
                let mut m = [[z; 4]; 4];
                m[0][0] = one;
                m[2][2] = one;
                m[1][3] = one;
                m[3][1] = one;
                GateMatrix::Two(m)
            }
            Gate::Cz(..) => {
                let mut m = [[z; 4]; 4];
                m[0][0] = one;
                m[1][1] = one;
                m[2][2] = one;
                m[3][3] = -one;
                GateMatrix::Two(m)
            }
        }
    }
}

impl<T: Real> fmt::Display for Gate<T> {
    /// `KIND target(s) [angle]`, angle with 17 significant digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind().name())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        if let Some(t) = self.angle() {
            write!(f, " {}", fmt_exact(t))?;
        }
        Ok(())
    }
}

impl<T: Real + FromStr> FromStr for Gate<T> {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let mut tokens = line.split_whitespace();
        let kind: GateKind = tokens
            .next()
            .ok_or_else(|| Error::Argument("empty gate line".into()))?
            .parse()?;
        let rest: Vec<&str> = tokens.collect();
        let n_q = kind.arity();
        let expected = n_q + usize::from(kind.is_parameterized());
        if rest.len() != expected {
            return Err(Error::Argument(format!(
                "`{line}`: expected {expected} fields after the kind"
            )));
        }
        let qubits = rest[..n_q]
            .iter()
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|e| Error::Argument(format!("bad qubit `{s}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let angle = rest
            .get(n_q)
            .map(|s| {
                s.parse::<T>()
                    .map_err(|_| Error::Argument(format!("bad angle `{s}`")))
            })
            .transpose()?;
        Gate::from_parts(kind, &qubits, angle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_gates() -> Vec<Gate<f64>> {
        vec![
            Gate::H(0),
            Gate::X(0),
            Gate::Y(0),
            Gate::Z(0),
            Gate::S(0),
            Gate::Rx(0, 0.37),
            Gate::Ry(0, -1.3),
            Gate::Rz(0, 2.9),
            Gate::Phase(0, 0.81),
            Gate::Cx {
                control: 0,
                target: 1,
            },
            Gate::Cz(0, 1),
        ]
    }

    fn is_unitary<const N: usize>(m: &[[Complex<f64>; N]; N]) -> bool {
        (0..N).all(|r| {
            (0..N).all(|c| {
                let dot: Complex<f64> = (0..N).map(|k| m[k][r].conj() * m[k][c]).sum();
                let want = if r == c { 1.0 } else { 0.0 };
                (dot - Complex::new(want, 0.0)).norm() <= 1e-12
            })
        })
    }

    #[test]
    fn every_kind_is_unitary() {
        for g in sample_gates() {
            let ok = match g.matrix() {
                GateMatrix::Single(m) => is_unitary(&m),
                GateMatrix::Two(m) => is_unitary(&m),
            };
            assert!(ok, "{g} is not unitary");
        }
    }

    #[test]
    fn display_parse_round_trip() {
        for g in sample_gates() {
            let text = g.to_string();
            let back: Gate<f64> = text.parse().unwrap();
            assert_eq!(back, g, "{text}");
        }
        assert_eq!(Gate::<f64>::Rx(3, 0.5).to_string(), "RX 3 5.0000000000000000e-1");
        assert_eq!(
            Gate::<f64>::Cx {
                control: 2,
                target: 0
            }
            .to_string(),
            "CX 2 0"
        );
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!("RX 0".parse::<Gate<f64>>().is_err());
        assert!("H 0 1.0".parse::<Gate<f64>>().is_err());
        assert!("FOO 0".parse::<Gate<f64>>().is_err());
        assert!("CX 1".parse::<Gate<f64>>().is_err());
    }

    #[test]
    fn validate_catches_bad_targets() {
        assert!(matches!(Gate::<f64>::H(2).validate(2), Err(Error::Index(_))));
        assert!(matches!(Gate::<f64>::Cz(1, 1).validate(2), Err(Error::Index(_))));
        assert!(Gate::<f64>::Cz(0, 1).validate(2).is_ok());
    }
}
