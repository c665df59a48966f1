//! Monte Carlo over uniformly random directions: second moments of
//! projections, and the stability form on random bilinear functions
//! `<v,N><w,N> - m`.

use super::forms::require_lambda_surface;
use crate::error::{Error, Result};
use crate::geometry::{QuadratureGrid, Surface};
use crate::linalg::dot;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// A uniformly distributed point of the unit sphere in `R^dim`.
pub fn uniform_sphere<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let r = dot(&v, &v).sqrt();
        if r > 1e-12 {
            return v.into_iter().map(|c| c / r).collect();
        }
    }
}

/// Independent generator for trial `index` of a seeded run.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    /// `<a,b> / (n+1)`.
    pub expected: f64,
}

impl McEstimate {
    /// Distance from the expected value in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.mean - self.expected).abs() / self.std_error.max(1e-300)
    }
}

pub const MIN_SAMPLES: usize = 10_000;

/// Estimates `E <v,a><v,b>` for `v` uniform on the unit sphere of `R^(n+1)`.
pub fn mean_inner_product(a: &[f64], b: &[f64], n: usize, samples: usize, seed: u64) -> Result<McEstimate> {
    let d = n + 1;
    if a.len() != d || b.len() != d {
        return Err(Error::InvalidParameter(format!("vectors must have {d} components")));
    }
    for v in [a, b] {
        if (dot(v, v) - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition("vectors must be unit length".into()));
        }
    }
    if samples < MIN_SAMPLES {
        return Err(Error::Precondition(format!("at least {MIN_SAMPLES} samples are needed, got {samples}")));
    }
    let mut rng = trial_rng(seed, 0);
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        let v = uniform_sphere(&mut rng, d);
        let x = dot(&v, a) * dot(&v, b);
        s1 += x;
        s2 += x * x;
    }
    let ns = samples as f64;
    let mean = s1 / ns;
    let var = (s2 / ns - mean * mean).max(0.0) * ns / (ns - 1.0);
    Ok(McEstimate { mean, std_error: (var / ns).sqrt(), samples, expected: dot(a, b) / d as f64 })
}

/// Node data shared by the bilinear computations.
struct Moments {
    p: f64,
    /// `int N N^T gamma`, row-major.
    m: Vec<f64>,
    d: usize,
}

impl Moments {
    fn new(grid: &QuadratureGrid) -> Self {
        let d = grid.ambient_dim();
        let mut m = vec![0.0; d * d];
        for (q, w) in grid.points.iter().zip(&grid.weight) {
            for i in 0..d {
                for j in 0..d {
                    m[i * d + j] += w * q.normal[i] * q.normal[j];
                }
            }
        }
        Self { p: grid.perimeter(), m, d }
    }

    fn quad(&self, u: &[f64], v: &[f64]) -> f64 {
        self.m.chunks(self.d).zip(u).map(|(row, ui)| ui * row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()).sum()
    }

    /// `tr M^2`.
    fn trace_sq(&self) -> f64 {
        self.m.iter().map(|v| v * v).sum()
    }
}

/// `int int int (1 - ||A_x||^2 - 2 ||A_y||_op^2) ||Pi_y N_z||^2 gamma gamma gamma`,
/// reduced to single integrals through `int ||Pi_y N_z||^2 gamma(z) = p - N_y^T M N_y`.
pub fn curvature_triple_integral(grid: &QuadratureGrid) -> f64 {
    let mo = Moments::new(grid);
    let t = |q: &crate::geometry::CurvaturePoint| mo.p - mo.quad(&q.normal, &q.normal);
    let excess = grid.integrate_with(|q| 1.0 - q.a_norm2);
    excess * grid.integrate_with(t) - 2.0 * mo.p * grid.integrate_with(|q| q.a_op2 * t(q))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BilinearTrial {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub m: f64,
    /// `(n+1)^2 int (<v,N><w,N> - m) L (<v,N><w,N> - m) gamma`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BilinearReport {
    pub trials: Vec<BilinearTrial>,
    pub mean: f64,
    pub std_error: f64,
    pub max: f64,
    pub best: usize,
    /// Exact expectation over independent uniform `v, w`.
    pub analytic: f64,
    /// Triple-integral lower bound divided by `p^2`.
    pub bound: f64,
}

impl BilinearReport {
    /// `max >= mean >= analytic >= bound`, the middle comparison up to
    /// `sigmas` standard errors of Monte Carlo noise, all up to rounding.
    pub fn chain_holds(&self, sigmas: f64) -> bool {
        let slack = 1e-10 * (self.analytic.abs() + self.bound.abs() + 1.0);
        self.max >= self.mean && self.mean >= self.analytic - sigmas * self.std_error - slack && self.analytic >= self.bound - slack
    }

    /// Rows `trial, v..., w..., value`.
    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        self.trials
            .iter()
            .enumerate()
            .map(|(i, t)| std::iter::once(i as f64).chain(t.v.iter().copied()).chain(t.w.iter().copied()).chain(std::iter::once(t.value)).collect())
            .collect()
    }
}

/// Evaluates the stability form on `trials` random bilinear functions. `L` of
/// the product is expanded exactly: `L(ab) = (1 - ||A||^2) ab + 2 <A Pi v, A Pi w>`
/// on a lambda-surface, where `L <v,N> = <v,N>`.
pub fn random_bilinear(surface: &Surface, grid: &QuadratureGrid, lambda: f64, trials: usize, seed: u64) -> Result<BilinearReport> {
    grid.check_owner(surface)?;
    require_lambda_surface(surface, grid, lambda)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is needed".into()));
    }
    let d = grid.ambient_dim();
    let scale = (d * d) as f64;
    let mo = Moments::new(grid);
    let p = mo.p;
    let mut out = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let v = uniform_sphere(&mut rng, d);
        let w = uniform_sphere(&mut rng, d);
        let m = mo.quad(&v, &w) / p;
        let mut acc = 0.0;
        for (q, wt) in grid.points.iter().zip(&grid.weight) {
            let ab = dot(&v, &q.normal) * dot(&w, &q.normal);
            let cross = dot(&q.shape_apply(&v), &q.shape_apply(&w));
            let lf = (1.0 - q.a_norm2) * ab + 2.0 * cross - m * (q.a_norm2 + 1.0);
            acc += (ab - m) * lf * wt;
        }
        out.push(BilinearTrial { v, w, m, value: scale * acc });
    }
    let ns = trials as f64;
    let mean = out.iter().map(|t| t.value).sum::<f64>() / ns;
    let var = if trials > 1 { out.iter().map(|t| (t.value - mean).powi(2)).sum::<f64>() / (ns - 1.0) } else { 0.0 };
    let (best, max) = out.iter().enumerate().fold((0, f64::NEG_INFINITY), |(bi, bm), (i, t)| if t.value > bm { (i, t.value) } else { (bi, bm) });
    let s = mo.trace_sq();
    let tr_a2m = grid.integrate_with(|q| q.principal.iter().zip(&q.directions).map(|(k, e)| k * k * mo.quad(e, e)).sum());
    let analytic = grid.integrate_with(|q| 1.0 - q.a_norm2) + grid.integrate_with(|q| q.a_norm2 - 1.0) * s / (p * p) - 2.0 / p * tr_a2m;
    let bound = curvature_triple_integral(grid) / (p * p);
    Ok(BilinearReport { trials: out, mean, std_error: (var / ns).sqrt(), max, best, analytic, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_surface, SurfaceSpec};
    use crate::stability::field::Field;
    use crate::stability::quadratic_value;
    use proptest::prelude::*;

    #[test]
    fn lemma_cases_bracket_expectation() {
        let e = |i: usize, d: usize| {
            let mut v = vec![0.0; d];
            v[i] = 1.0;
            v
        };
        for (a, b, n) in [(e(0, 2), e(0, 2), 1), (e(0, 3), e(1, 3), 2), (e(2, 3), e(2, 3), 2)] {
            let est = mean_inner_product(&a, &b, n, 200_000, 11).unwrap();
            assert!(est.z_score() < 3.0, "{est:?}");
        }
        assert_eq!(mean_inner_product(&e(0, 2), &e(0, 2), 1, 50_000, 3), mean_inner_product(&e(0, 2), &e(0, 2), 1, 50_000, 3));
        assert!(mean_inner_product(&e(0, 2), &e(0, 2), 1, 10, 3).is_err());
    }

    #[test]
    fn product_expansion_matches_jets() {
        // the algebraic L(ab) agrees with differentiating the product directly
        let (r, n) = (1.3, 2);
        let s = make_surface(SurfaceSpec::Sphere { r, n }).unwrap();
        let g = s.grid(512).unwrap();
        let rep = random_bilinear(&s, &g, n as f64 / r - r, 3, 5).unwrap();
        for t in &rep.trials {
            let f = Field::sum(Field::product(Field::NormalDot(t.v.clone()), Field::NormalDot(t.w.clone())), Field::Const(-t.m));
            let q = quadratic_value(&g, &f).unwrap() * 9.0;
            assert!((q - t.value).abs() < 1e-12 * (1.0 + q.abs()), "{q} {}", t.value);
        }
    }

    #[test]
    fn sphere_sharpness() {
        for n in 1..=3 {
            let r = ((n + 2) as f64).sqrt();
            let s = make_surface(SurfaceSpec::Sphere { r, n }).unwrap();
            let g = s.grid(512).unwrap();
            let rep = random_bilinear(&s, &g, n as f64 / r - r, 200, 1).unwrap();
            assert!(rep.analytic.abs() < 1e-12, "{}", rep.analytic);
            assert!((rep.analytic - rep.bound).abs() < 1e-12);
            assert!(rep.chain_holds(3.0), "{} {} {} {} {}", rep.max, rep.mean, rep.std_error, rep.analytic, rep.bound);
        }
    }

    #[test]
    fn orthogonal_directions_have_zero_mean_term() {
        let s = make_surface(SurfaceSpec::Sphere { r: 1.5, n: 2 }).unwrap();
        let g = s.grid(256).unwrap();
        let mo = Moments::new(&g);
        assert!(mo.quad(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).abs() < 1e-15);
    }

    #[test]
    fn deterministic_under_seed() {
        let s = make_surface(SurfaceSpec::Cylinder { r: 1.0, k: 1, n: 2 }).unwrap();
        let g = s.grid(256).unwrap();
        let a = random_bilinear(&s, &g, 0.0, 20, 9).unwrap();
        let b = random_bilinear(&s, &g, 0.0, 20, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.chain_holds(3.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn uniform_points_are_unit(seed in any::<u64>(), d in 1usize..6) {
            let v = uniform_sphere(&mut trial_rng(seed, 0), d);
            prop_assert!((dot(&v, &v) - 1.0).abs() < 1e-12);
        }
    }
}
