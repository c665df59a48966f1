//! Small dense and banded linear algebra used by the spectral and flow code:
//! Householder tridiagonalization, implicit-shift QL, cyclic Jacobi for tiny
//! matrices, and (cyclic) tridiagonal solves.

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `y += s * x`
pub fn axpy(y: &mut [f64], s: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// Dense row-major square matrix times vector.
pub fn matvec(m: &[f64], n: usize, v: &[f64]) -> Vec<f64> {
    (0..n).map(|i| dot(&m[i * n..(i + 1) * n], v)).collect()
}

/// Eigen-decomposition of a symmetric tridiagonal matrix by the QL algorithm
/// with implicit Wilkinson shifts.
///
/// `d` holds the diagonal and is overwritten by the eigenvalues (unsorted).
/// `e[i]` couples rows `i` and `i+1`; its last entry is ignored and the slice is
/// destroyed. If `z` is given (row-major `n x n`), the plane rotations are
/// accumulated into it, so passing the identity yields eigenvectors as columns.
pub fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::ConvergenceFailure("tridiagonal QL iteration stalled".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut early_exit = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early_exit = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let zk = &mut z[k * n..(k + 1) * n];
                        let f = zk[i + 1];
                        zk[i + 1] = s * zk[i] + c * f;
                        zk[i] = c * zk[i] - s * f;
                    }
                }
            }
            if early_exit {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Reduces a dense symmetric row-major matrix to tridiagonal form by
/// Householder reflections. Returns `(diagonal, off_diagonal)`; the input is
/// destroyed. Orthogonal factors are not accumulated.
pub fn householder_tridiagonal(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let col: Vec<f64> = (0..m).map(|i| a[(k + 1 + i) * n + k]).collect();
        let mut alpha = norm(&col);
        d[k] = a[k * n + k];
        if alpha == 0.0 {
            e[k] = 0.0;
            continue;
        }
        if col[0] > 0.0 {
            alpha = -alpha;
        }
        v[..m].copy_from_slice(&col);
        v[0] -= alpha;
        let vn2 = dot(&v[..m], &v[..m]);
        e[k] = alpha;
        if vn2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vn2;
        let off = k + 1;
        for i in 0..m {
            let row = &a[(off + i) * n + off..(off + i) * n + off + m];
            p[i] = beta * dot(row, &v[..m]);
        }
        let kk = 0.5 * beta * dot(&v[..m], &p[..m]);
        for i in 0..m {
            p[i] -= kk * v[i];
        }
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[(off + i) * n + off..(off + i) * n + off + m];
            for j in 0..m {
                row[j] -= vi * p[j] + wi * v[j];
            }
        }
    }
    if n >= 2 {
        d[n - 2] = a[(n - 2) * n + n - 2];
        e[n - 2] = a[(n - 1) * n + n - 2];
    }
    if n >= 1 {
        d[n - 1] = a[(n - 1) * n + n - 1];
    }
    (d, e)
}

/// All eigenvalues of a dense symmetric matrix, sorted descending.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    let (mut d, mut e) = householder_tridiagonal(&mut a, n);
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_by(|x, y| y.total_cmp(x));
    Ok(d)
}

/// Cyclic Jacobi eigen-decomposition of a small symmetric matrix.
/// Returns eigenvalues (descending) and matching unit eigenvectors.
pub fn jacobi_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i * n + j].powi(2)).sum();
        let diag: f64 = (0..n).map(|i| m[i * n + i].powi(2)).sum();
        if off <= 1e-30 * diag.max(1e-300) || off == 0.0 {
            break;
        }
        for pi in 0..n {
            for qi in pi + 1..n {
                let apq = m[pi * n + qi];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[qi * n + qi] - m[pi * n + pi]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + pi];
                    let mkq = m[k * n + qi];
                    m[k * n + pi] = c * mkp - s * mkq;
                    m[k * n + qi] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[pi * n + k];
                    let mqk = m[qi * n + k];
                    m[pi * n + k] = c * mpk - s * mqk;
                    m[qi * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + pi];
                    let vkq = v[k * n + qi];
                    v[k * n + pi] = c * vkp - s * vkq;
                    v[k * n + qi] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]));
    let vals = idx.iter().map(|&i| m[i * n + i]).collect();
    let vecs = idx.iter().map(|&i| (0..n).map(|k| v[k * n + i]).collect()).collect();
    (vals, vecs)
}

/// Solves a tridiagonal system `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::ConvergenceFailure("singular tridiagonal pivot".into()));
    }
    x[0] = rhs[0] / beta;
    for i in 1..n {
        c[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i];
        if beta == 0.0 {
            return Err(Error::ConvergenceFailure("singular tridiagonal pivot".into()));
        }
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i + 1] * next;
    }
    Ok(x)
}

/// Solves a periodic tridiagonal system where `lower[0]` multiplies `x[n-1]`
/// and `upper[n-1]` multiplies `x[0]` (Sherman-Morrison reduction).
pub fn solve_cyclic_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n < 3 {
        return Err(Error::InvalidParameter("cyclic system needs at least 3 unknowns".into()));
    }
    let alpha = upper[n - 1];
    let beta = lower[0];
    let gamma = -diag[0];
    let mut bb = diag.to_vec();
    bb[0] = diag[0] - gamma;
    bb[n - 1] = diag[n - 1] - alpha * beta / gamma;
    let x = solve_tridiagonal(lower, &bb, upper, rhs)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiagonal(lower, &bb, upper, &u)?;
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    Ok(x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect())
}
