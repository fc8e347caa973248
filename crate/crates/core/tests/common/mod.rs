#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use num_complex::Complex64;
use qsvm_churn::ml::SvmKernel;
use qsvm_churn::quantum::{Circuit, Gate, GateKind};
use qsvm_churn::rng::seeded;
use rand::Rng;

/// Uniformly random gate sequence over every gate kind.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, len: usize) -> Circuit<f64> {
    let kinds: Vec<GateKind> = GateKind::ALL
        .iter()
        .copied()
        .filter(|k| k.arity() <= n)
        .collect();
    let gates: Vec<Gate<f64>> = (0..len)
        .map(|_| {
            let kind = kinds[rng.random_range(0..kinds.len())];
            let a = rng.random_range(0..n);
            let mut qubits = vec![a];
            if kind.arity() == 2 {
                let mut b = rng.random_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                qubits.push(b);
            }
            let angle = kind
                .is_parameterized()
                .then(|| rng.random_range(-2.0 * std::f64::consts::PI..2.0 * std::f64::consts::PI));
            Gate::from_parts(kind, &qubits, angle).unwrap()
        })
        .collect();
    Circuit::from_gates(n, gates).unwrap()
}

/// Random normalized amplitudes.
pub fn random_amplitudes<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, lo: f64, hi: f64) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(lo..hi))
}

/// Central difference gradient with step `h`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|k| {
            p[k] = x[k] + h;
            let plus = f(&p);
            p[k] = x[k] - h;
            let minus = f(&p);
            p[k] = x[k];
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// Richardson extrapolation of two central differences (steps `h` and
/// `h/2`), fourth order in `h`.
pub fn richardson_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let coarse = central_difference(&f, x, h);
    let fine = central_difference(&f, x, h / 2.0);
    fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect()
}

/// `max_k |a_k - b_k| / max_k |b_k|`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = b.iter().map(|y| y.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub fn to_nalgebra(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub fn min_eigenvalue(a: &Array2<f64>) -> f64 {
    to_nalgebra(a).symmetric_eigen().eigenvalues.min()
}

/// Exact maximizer of the SVM dual found by enumerating active sets.
#[derive(Debug, Clone)]
pub struct DualOptimum {
    pub alpha: Vec<f64>,
    pub bias: Option<f64>,
    pub objective: f64,
}

pub fn dual_value(alpha: &[f64], y: &[i8], gram: &Array2<f64>) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * f64::from(y[i]) * f64::from(y[j]) * gram[[i, j]];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Every coordinate is pinned at 0, pinned at `c`, or free; free
/// coordinates and the bias solve the stationarity system
/// `(Q a)_i + y_i b = 1`, `sum y a = 0`. The best feasible candidate wins.
pub fn brute_force_dual(gram: &Array2<f64>, y: &[i8], c: f64) -> DualOptimum {
    let n = y.len();
    assert!(n <= 8, "enumeration is 3^n");
    let yf: Vec<f64> = y.iter().map(|v| f64::from(*v)).collect();
    let q = |i: usize, j: usize| yf[i] * yf[j] * gram[[i, j]];
    let mut best: Option<DualOptimum> = None;
    for code in 0..3usize.pow(n as u32) {
        let mut state = vec![0u8; n];
        let mut rest = code;
        for s in state.iter_mut() {
            *s = (rest % 3) as u8;
            rest /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut alpha: Vec<f64> = state.iter().map(|s| if *s == 1 { c } else { 0.0 }).collect();
        let mut bias = None;
        if free.is_empty() {
            let eq: f64 = alpha.iter().zip(&yf).map(|(a, t)| a * t).sum();
            if eq.abs() > 1e-12 {
                continue;
            }
        } else {
            let k = free.len();
            let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
            let mut rhs = DVector::<f64>::zeros(k + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[(r, s)] = q(i, j);
                }
                a[(r, k)] = yf[i];
                let fixed: f64 = (0..n).filter(|j| state[*j] == 1).map(|j| q(i, j) * c).sum();
                rhs[r] = 1.0 - fixed;
                a[(k, r)] = yf[i];
            }
            rhs[k] = -(0..n).filter(|j| state[*j] == 1).map(|j| yf[j] * c).sum::<f64>();
            let Some(sol) = a.lu().solve(&rhs) else { continue };
            if sol.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let mut feasible = true;
            for (r, &i) in free.iter().enumerate() {
                if sol[r] < -1e-12 || sol[r] > c + 1e-12 {
                    feasible = false;
                }
                alpha[i] = sol[r].clamp(0.0, c);
            }
            if !feasible {
                continue;
            }
            bias = Some(sol[k]);
        }
        let objective = dual_value(&alpha, y, gram);
        if best.as_ref().is_none_or(|b| objective > b.objective) {
            best = Some(DualOptimum {
                alpha,
                bias,
                objective,
            });
        }
    }
    best.expect("alpha = 0 is always feasible")
}

/// Small labelled instances with both classes present.
pub fn svm_instance(seed: u64) -> (Array2<f64>, Vec<i8>, f64, SvmKernel<f64>) {
    let mut rng = seeded(seed);
    let n = rng.random_range(2..=6);
    let x = random_matrix(&mut rng, n, 2, -2.0, 2.0);
    let mut y: Vec<i8> = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
    y[0] = 1;
    y[1] = -1;
    let c = [0.5, 1.0, 10.0][rng.random_range(0..3)];
    let kernel = if rng.random_bool(0.5) {
        SvmKernel::Linear
    } else {
        SvmKernel::Rbf {
            gamma: rng.random_range(0.2..2.0),
        }
    };
    (x, y, c, kernel)
}
