//! Sparse multivariate polynomials on the ambient space, with exact value,
//! gradient and Hessian evaluation. Used to extend test functions off
//! closed-form surfaces so tangential derivatives can be taken analytically.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Vec<u8>, f64>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        if c != 0.0 {
            p.terms.insert(vec![0; dim], c);
        }
        p
    }

    /// The coordinate function `x_i`.
    pub fn coord(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        let mut p = Self::zero(dim);
        p.terms.insert(e, 1.0);
        p
    }

    /// The linear form `<v, x>`.
    pub fn linear(v: &[f64]) -> Self {
        let dim = v.len();
        let mut p = Self::zero(dim);
        for (i, &vi) in v.iter().enumerate() {
            p = p.add(&Self::coord(dim, i).scale(vi));
        }
        p
    }

    /// `|x|^2` restricted to the coordinates in `idx`.
    pub fn norm_sq(dim: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut p = Self::zero(dim);
        for i in idx {
            let xi = Self::coord(dim, i);
            p = p.add(&xi.mul(&xi));
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().map(|&k| k as u32).sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            *out.terms.entry(e.clone()).or_insert(0.0) += c;
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }

    pub fn scale(&self, s: f64) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.dim, other.dim);
        let mut out = Poly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *out.terms.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }

    /// Value, gradient and row-major Hessian at `x`.
    pub fn jet(&self, x: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let d = self.dim;
        let mut val = 0.0;
        let mut grad = vec![0.0; d];
        let mut hess = vec![0.0; d * d];
        let pow = |b: f64, e: i32| if e < 0 { 0.0 } else { b.powi(e) };
        for (e, &c) in &self.terms {
            let full: f64 = (0..d).map(|i| pow(x[i], e[i] as i32)).product();
            val += c * full;
            for i in 0..d {
                if e[i] == 0 {
                    continue;
                }
                let gi: f64 = (0..d).map(|k| if k == i { e[k] as f64 * pow(x[k], e[k] as i32 - 1) } else { pow(x[k], e[k] as i32) }).product();
                grad[i] += c * gi;
                for j in 0..d {
                    let hij: f64 = (0..d)
                        .map(|k| {
                            let ek = e[k] as i32;
                            let mut factor = 1.0;
                            let mut drop = 0;
                            if k == i {
                                factor *= ek as f64;
                                drop += 1;
                            }
                            if k == j {
                                factor *= (ek - drop) as f64;
                                drop += 1;
                            }
                            if factor == 0.0 {
                                0.0
                            } else {
                                factor * pow(x[k], ek - drop)
                            }
                        })
                        .product();
                    hess[i * d + j] += c * hij;
                }
            }
        }
        (val, grad, hess)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.jet(x).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_jet_matches_hand_derivatives() {
        // p = x0^2 x1 + 3 x2
        let x0 = Poly::coord(3, 0);
        let x1 = Poly::coord(3, 1);
        let p = x0.mul(&x0).mul(&x1).add(&Poly::coord(3, 2).scale(3.0));
        let x = [1.5, -2.0, 0.5];
        let (v, g, h) = p.jet(&x);
        assert!((v - (2.25 * -2.0 + 1.5)).abs() < 1e-15);
        assert_eq!(g, vec![2.0 * 1.5 * -2.0, 2.25, 3.0]);
        let expect = [-4.0, 3.0, 0.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for (a, b) in h.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn hessian_is_symmetric_and_matches_fd() {
        let v = [0.3, -1.1, 0.7];
        let l = Poly::linear(&v);
        let q = l.mul(&l).mul(&Poly::norm_sq(3, 0..3)).add(&Poly::constant(3, 2.0));
        let x = [0.4, 0.9, -0.2];
        let (_, g, h) = q.jet(&x);
        let eps = 1e-6;
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += eps;
            xm[i] -= eps;
            let fd = (q.eval(&xp) - q.eval(&xm)) / (2.0 * eps);
            assert!((fd - g[i]).abs() < 1e-8);
            for j in 0..3 {
                assert!((h[i * 3 + j] - h[j * 3 + i]).abs() < 1e-14);
            }
            let (_, gp, _) = q.jet(&xp);
            let (_, gm, _) = q.jet(&xm);
            for j in 0..3 {
                assert!(((gp[j] - gm[j]) / (2.0 * eps) - h[i * 3 + j]).abs() < 1e-7);
            }
        }
    }
}
