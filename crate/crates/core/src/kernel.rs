//! Fidelity kernels `K(x, y) = |<phi(x)|phi(y)>|^2` over encoded samples.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1};
use rayon::prelude::*;

use crate::data::FeatureMatrix;
use crate::encoding::{build_feature_map, FeatureMapSpec};
use crate::error::{Error, Result};
use crate::quantum::StateVector;
use crate::rng::sub_seed;
use crate::scalar::{fmt_exact, Real};

/// Gram (or cross-Gram) matrix of fidelities.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix<T> {
    pub values: Array2<T>,
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    pub feature_map: FeatureMapSpec,
}

impl<T: Real> KernelMatrix<T> {
    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn is_square_gram(&self) -> bool {
        self.row_ids == self.col_ids
    }

    pub fn with_ids(mut self, row_ids: Vec<String>, col_ids: Vec<String>) -> Result<Self> {
        if row_ids.len() != self.nrows() || col_ids.len() != self.ncols() {
            return Err(Error::Shape("id count does not match kernel shape".into()));
        }
        self.row_ids = row_ids;
        self.col_ids = col_ids;
        Ok(self)
    }
}

fn default_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Encoded state `phi(x)|0...0>`.
pub fn encode<T: Real>(spec: &FeatureMapSpec, x: &[T]) -> Result<StateVector<T>> {
    let circuit = build_feature_map(spec, x)?;
    StateVector::ground_state(spec.num_qubits())?.apply_circuit(&circuit)
}

fn fidelity<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> T {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(p, q)| p.conj() * q)
        .sum::<num_complex::Complex<T>>()
        .norm_sqr()
}

/// Exact statevector fidelity between two samples.
pub fn kernel_entry_exact<T: Real>(spec: &FeatureMapSpec, x: &[T], y: &[T]) -> Result<T> {
    let a = encode(spec, x)?;
    let b = encode(spec, y)?;
    Ok(a.inner_product(&b)?.norm_sqr())
}

/// Inversion-test estimate: the all-zeros frequency after `U(y)^dagger U(x)`.
pub fn kernel_entry_sampled<T: Real>(
    spec: &FeatureMapSpec,
    x: &[T],
    y: &[T],
    shots: u64,
    seed: u64,
) -> Result<T> {
    if shots == 0 {
        return Err(Error::Argument("shots must be positive".into()));
    }
    let mut circuit = build_feature_map(spec, x)?;
    circuit.append(&build_feature_map(spec, y)?.adjoint())?;
    let state = StateVector::ground_state(spec.num_qubits())?.apply_circuit(&circuit)?;
    let record = state.sample_counts(shots, seed)?;
    let zeros = "0".repeat(spec.num_qubits());
    Ok(T::from_u64(record.count(&zeros)).expect("count fits") / T::from_u64(shots).expect("shots fit"))
}

/// How kernel entries are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMode {
    Exact,
    /// Shot-based inversion test; the entry at `(i, j)` uses seed
    /// `master ^ (i * ncols + j)`.
    Sampled { shots: u64, seed: u64 },
}

fn check_columns<T: Real>(spec: &FeatureMapSpec, m: &FeatureMatrix<T>) -> Result<()> {
    if m.ncols() != spec.num_features {
        return Err(Error::Shape(format!(
            "feature map expects {} columns, matrix has {}",
            spec.num_features,
            m.ncols()
        )));
    }
    Ok(())
}

fn row_vec<T: Real>(r: ArrayView1<'_, T>) -> Vec<T> {
    r.iter().copied().collect()
}

fn with_pool<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Kernel between the rows of `x` and the rows of `y` (or `x` itself).
///
/// With `y` omitted only the upper triangle is evaluated and mirrored. The
/// result does not depend on `workers`.
pub fn kernel_matrix<T: Real>(
    spec: &FeatureMapSpec,
    x: &FeatureMatrix<T>,
    y: Option<&FeatureMatrix<T>>,
    mode: KernelMode,
    workers: usize,
) -> Result<KernelMatrix<T>> {
    spec.validate()?;
    check_columns(spec, x)?;
    if let Some(y) = y {
        check_columns(spec, y)?;
    }
    let n = x.nrows();
    let m = y.map_or(n, FeatureMatrix::nrows);
    let square = y.is_none();

    let values = with_pool(workers, || -> Result<Array2<T>> {
        let mut values = Array2::<T>::zeros((n, m));
        match mode {
            KernelMode::Exact => {
                let encode_rows = |mat: &FeatureMatrix<T>| -> Result<Vec<StateVector<T>>> {
                    (0..mat.nrows())
                        .into_par_iter()
                        .map(|i| encode(spec, &row_vec(mat.row(i))))
                        .collect()
                };
                let left = encode_rows(x)?;
                let right_owned;
                let right = match y {
                    Some(y) => {
                        right_owned = encode_rows(y)?;
                        &right_owned
                    }
                    None => &left,
                };
                let rows: Vec<Vec<T>> = (0..n)
                    .into_par_iter()
                    .map(|i| {
                        let start = if square { i } else { 0 };
                        (start..m).map(|j| fidelity(&left[i], &right[j])).collect()
                    })
                    .collect();
                fill(&mut values, rows, square);
            }
            KernelMode::Sampled { shots, seed } => {
                let yy = y.unwrap_or(x);
                let rows: Vec<Vec<T>> = (0..n)
                    .into_par_iter()
                    .map(|i| {
                        let start = if square { i } else { 0 };
                        let xi = row_vec(x.row(i));
                        (start..m)
                            .map(|j| {
                                let s = sub_seed(seed, (i * m + j) as u64);
                                kernel_entry_sampled(spec, &xi, &row_vec(yy.row(j)), shots, s)
                            })
                            .collect::<Result<Vec<T>>>()
                    })
                    .collect::<Result<_>>()?;
                fill(&mut values, rows, square);
            }
        }
        Ok(values)
    })??;

    Ok(KernelMatrix {
        values,
        row_ids: default_ids(n),
        col_ids: default_ids(m),
        feature_map: *spec,
    })
}

fn fill<T: Real>(values: &mut Array2<T>, rows: Vec<Vec<T>>, square: bool) {
    for (i, row) in rows.into_iter().enumerate() {
        let start = if square { i } else { 0 };
        for (offset, v) in row.into_iter().enumerate() {
            let j = start + offset;
            values[[i, j]] = v;
            if square {
                values[[j, i]] = v;
            }
        }
    }
}

const MAGIC: &str = "QKERNEL";
const VERSION: &str = "v1";

/// Writes `QKERNEL v1 n m`, the feature-map descriptor, optional `rows`/`cols`
/// id lines (only when ids differ from `0..n`), then one line of values per row.
pub fn save_kernel<T: Real>(kernel: &KernelMatrix<T>, path: &Path) -> Result<()> {
    fs::write(path, kernel_to_string(kernel)?).map_err(|e| Error::io(path, e))
}

pub fn kernel_to_string<T: Real>(kernel: &KernelMatrix<T>) -> Result<String> {
    let (n, m) = (kernel.nrows(), kernel.ncols());
    if n == 0 || m == 0 {
        return Err(Error::Shape("refusing to persist an empty kernel".into()));
    }
    let mut out = String::new();
    writeln!(out, "{MAGIC} {VERSION} {n} {m}").unwrap();
    writeln!(out, "{}", kernel.feature_map).unwrap();
    if kernel.row_ids != default_ids(n) {
        writeln!(out, "rows {}", kernel.row_ids.join(" ")).unwrap();
    }
    if kernel.col_ids != default_ids(m) {
        writeln!(out, "cols {}", kernel.col_ids.join(" ")).unwrap();
    }
    for row in kernel.values.rows() {
        let line: Vec<String> = row.iter().map(|&v| fmt_exact(v)).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    Ok(out)
}

pub fn load_kernel<T: Real + FromStr>(path: &Path) -> Result<KernelMatrix<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_kernel(&text)
}

pub fn parse_kernel<T: Real + FromStr>(text: &str) -> Result<KernelMatrix<T>> {
    let fmt_err = |line: usize, message: String| Error::Format { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (ln, header) = lines.next().ok_or_else(|| fmt_err(1, "empty file".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != MAGIC || h[1] != VERSION {
        return Err(fmt_err(ln, format!("expected `{MAGIC} {VERSION} n m`, got `{header}`")));
    }
    let n: usize = h[2].parse().map_err(|e| fmt_err(ln, format!("bad n: {e}")))?;
    let m: usize = h[3].parse().map_err(|e| fmt_err(ln, format!("bad m: {e}")))?;
    if n == 0 || m == 0 {
        return Err(fmt_err(ln, "empty kernel".into()));
    }

    let (ln, desc) = lines
        .next()
        .ok_or_else(|| fmt_err(2, "missing feature-map descriptor".into()))?;
    let feature_map: FeatureMapSpec = desc.parse().map_err(|e: Error| fmt_err(ln, e.to_string()))?;

    let mut row_ids = default_ids(n);
    let mut col_ids = default_ids(m);
    let mut values = Array2::<T>::zeros((n, m));
    let mut row = 0;
    for (ln, line) in lines {
        if let Some(ids) = line.strip_prefix("rows ") {
            row_ids = ids.split_whitespace().map(str::to_owned).collect();
            if row_ids.len() != n {
                return Err(fmt_err(ln, format!("{} row ids for {n} rows", row_ids.len())));
            }
            continue;
        }
        if let Some(ids) = line.strip_prefix("cols ") {
            col_ids = ids.split_whitespace().map(str::to_owned).collect();
            if col_ids.len() != m {
                return Err(fmt_err(ln, format!("{} column ids for {m} columns", col_ids.len())));
            }
            continue;
        }
        if row >= n {
            return Err(fmt_err(ln, format!("more than {n} value rows")));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != m {
            return Err(fmt_err(
                ln,
                format!("row {row} has {} values, expected {m}", fields.len()),
            ));
        }
        for (j, f) in fields.iter().enumerate() {
            let v: T = f
                .parse()
                .map_err(|_| fmt_err(ln, format!("row {row}: bad value `{f}`")))?;
            if !v.is_finite() {
                return Err(fmt_err(ln, format!("row {row}: non-finite value")));
            }
            values[[row, j]] = v;
        }
        row += 1;
    }
    if row != n {
        return Err(fmt_err(text.lines().count(), format!("found {row} of {n} value rows")));
    }
    Ok(KernelMatrix {
        values,
        row_ids,
        col_ids,
        feature_map,
    })
}
