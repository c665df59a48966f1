//! Gauss rules: Legendre and Gegenbauer on `[-1, 1]`, and Hermite for the
//! standard normal weight (probabilists' convention, weights summing to one).

use crate::linalg::tridiagonal_ql;
use crate::special::ln_gamma;
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..m {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = m as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss-Hermite rule for `E[f(Z)]`, `Z ~ N(0,1)`, by the Golub-Welsch method.
pub fn gauss_hermite(m: usize) -> (Vec<f64>, Vec<f64>) {
    let e: Vec<f64> = (1..=m).map(|k| (k as f64).sqrt()).collect();
    golub_welsch_symmetric(e, 1.0)
}

/// Gauss rule for the weight `(1 - u^2)^a` on `[-1, 1]`, `a > -1`, nodes ascending.
pub fn gauss_gegenbauer(m: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(a > -1.0, "Gegenbauer exponent must exceed -1");
    let e: Vec<f64> = (1..=m)
        .map(|j| {
            let j = j as f64;
            (j * (j + 2.0 * a) / (4.0 * (j + a) * (j + a) - 1.0)).sqrt()
        })
        .collect();
    let mu0 = (PI.ln() * 0.5 + ln_gamma(a + 1.0) - ln_gamma(a + 1.5)).exp();
    golub_welsch_symmetric(e, mu0)
}

/// Nodes and weights from a Jacobi matrix with zero diagonal and off-diagonal
/// `e`, for a symmetric weight of total mass `mu0`. Output is exactly symmetric.
fn golub_welsch_symmetric(mut e: Vec<f64>, mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let m = e.len();
    let mut d = vec![0.0; m];
    let mut z = vec![0.0; m * m];
    for i in 0..m {
        z[i * m + i] = 1.0;
    }
    tridiagonal_ql(&mut d, &mut e, Some(&mut z)).expect("Jacobi matrix of a classical weight is well conditioned");
    let mut pairs: Vec<(f64, f64)> = (0..m).map(|j| (d[j], z[j] * z[j])).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut w: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    for i in 0..m / 2 {
        let xs = 0.5 * (x[m - 1 - i] - x[i]);
        let ws = 0.5 * (w[i] + w[m - 1 - i]);
        x[i] = -xs;
        x[m - 1 - i] = xs;
        w[i] = ws;
        w[m - 1 - i] = ws;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    let total: f64 = w.iter().sum();
    for wi in &mut w {
        *wi *= mu0 / total;
    }
    (x, w)
}
