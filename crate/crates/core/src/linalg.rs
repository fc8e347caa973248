//! Small dense linear algebra: symmetric eigendecomposition, pivoted solves,
//! least-squares residuals.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenpairs of a symmetric matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    pub values: Array1<T>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: Array2<T>,
}

/// Cyclic Jacobi eigensolver.
///
/// Eigenvector signs are normalized so that the largest-magnitude entry of
/// each vector is positive (first such entry on ties).
pub fn symmetric_eigen<T: Real>(a: ArrayView2<'_, T>) -> Result<SymmetricEigen<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Shape(format!("eigen of a {}x{} matrix", n, a.ncols())));
    }
    let mut m = a.to_owned();
    // symmetrize to absorb rounding asymmetry from callers
    for i in 0..n {
        for j in i + 1..n {
            let v = (m[[i, j]] + m[[j, i]]) * T::lit(0.5);
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
    }
    let mut v = Array2::<T>::eye(n);
    let scale = m.iter().map(|x| *x * *x).sum::<T>();
    let threshold = scale * T::epsilon() * T::epsilon();

    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[[i, j]] * m[[i, j]])
            .sum();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[j, j]].partial_cmp(&m[[i, i]]).unwrap_or(std::cmp::Ordering::Equal));
    let values = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut vectors = v.select(Axis(1), &order);
    for mut col in vectors.columns_mut() {
        let mut best = 0;
        for k in 0..col.len() {
            if col[k].abs() > col[best].abs() {
                best = k;
            }
        }
        if !col.is_empty() && col[best] < T::zero() {
            col.mapv_inplace(|x| -x);
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve<T: Real>(a: ArrayView2<'_, T>, b: ArrayView1<'_, T>) -> Result<Array1<T>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::Shape(format!(
            "solve needs a square system, got {}x{} with rhs {}",
            n,
            a.ncols(),
            b.len()
        )));
    }
    let mut m = a.to_owned();
    let mut rhs = b.to_owned();
    let max_abs = m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    let tol = max_abs * T::epsilon() * T::from_usize_lossy(n.max(1)) * T::lit(16.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[[i, col]].abs().partial_cmp(&m[[j, col]].abs()).unwrap())
            .unwrap();
        if m[[pivot, col]].abs() <= tol {
            return Err(Error::Rank(format!("system is singular at column {col}")));
        }
        if pivot != col {
            for k in 0..n {
                m.swap([col, k], [pivot, k]);
            }
            rhs.swap(col, pivot);
        }
        for r in col + 1..n {
            let f = m[[r, col]] / m[[col, col]];
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                let sub = f * m[[col, k]];
                m[[r, k]] -= sub;
            }
            let sub = f * rhs[col];
            rhs[r] -= sub;
        }
    }
    let mut x = Array1::<T>::zeros(n);
    for r in (0..n).rev() {
        let s: T = (r + 1..n).map(|k| m[[r, k]] * x[k]).sum();
        x[r] = (rhs[r] - s) / m[[r, r]];
    }
    Ok(x)
}

/// Residual of the least-squares projection of `y` onto the column span of `a`.
///
/// Uses modified Gram-Schmidt with one reorthogonalization pass; columns
/// already in the span of earlier ones (relative norm below 1e-10) are
/// skipped, so rank-deficient designs are fine.
pub fn projection_residual<T: Real>(a: ArrayView2<'_, T>, y: ArrayView1<'_, T>) -> Result<Array1<T>> {
    if a.nrows() != y.len() {
        return Err(Error::Shape(format!(
            "design has {} rows, target has {}",
            a.nrows(),
            y.len()
        )));
    }
    let rel_tol = T::lit(1e-10);
    let mut basis: Vec<Array1<T>> = Vec::new();
    for col in a.columns() {
        let original = col.dot(&col).sqrt();
        if original == T::zero() {
            continue;
        }
        let mut v = col.to_owned();
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dot(&v);
                v.scaled_add(-proj, q);
            }
        }
        let norm = v.dot(&v).sqrt();
        if norm > rel_tol * original {
            basis.push(v / norm);
        }
    }
    let mut r = y.to_owned();
    for _ in 0..2 {
        for q in &basis {
            let proj = q.dot(&r);
            r.scaled_add(-proj, q);
        }
    }
    Ok(r)
}
