//! First and second variations of Gaussian volume and perimeter along the
//! normal variation `x + s f(x) N(x)`, optionally combined with the dilation
//! `x / sqrt(t_s)`, `t_s = 1 + h s + h' s^2 / 2`.

use crate::error::{Error, Result};
use crate::geometry::{QuadratureGrid, Surface};
use crate::stability::field::{jets, Field};
use crate::stability::operator::l_from_jets;
use serde::Serialize;

/// A normal variation field together with its dilation speed.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationInput {
    pub f: Field,
    /// `grad_N f` at every node; the acceleration of the variation is
    /// `f grad_N f` in the normal direction.
    pub normal_derivative: Option<Vec<f64>>,
    pub h: f64,
    pub h_prime: f64,
    /// Require `f` and `grad_N f` to be even under `x -> -x`.
    pub symmetric: bool,
}

impl VariationInput {
    pub fn new(f: Field) -> Self {
        Self { f, normal_derivative: None, h: 0.0, h_prime: 0.0, symmetric: false }
    }

    pub fn with_dilation(mut self, h: f64, h_prime: f64) -> Self {
        self.h = h;
        self.h_prime = h_prime;
        self
    }

    pub fn with_normal_derivative(mut self, d: Vec<f64>) -> Self {
        self.normal_derivative = Some(d);
        self
    }

    /// Extension along normal lines: `grad_N f = 0`.
    pub fn straight(self, grid: &QuadratureGrid) -> Self {
        self.with_normal_derivative(vec![0.0; grid.len()])
    }

    /// The volume-preserving extension `grad_N f = -lambda f`.
    pub fn volume_preserving(self, grid: &QuadratureGrid, lambda: f64) -> Result<Self> {
        let d = self.f.values(grid)?.into_iter().map(|v| -lambda * v).collect();
        Ok(self.with_normal_derivative(d))
    }

    pub fn symmetric(mut self) -> Self {
        self.symmetric = true;
        self
    }
}

/// Derivatives at `s = 0` of Gaussian volume and perimeter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstVariation {
    pub volume: f64,
    pub perimeter: f64,
}

fn prepare(surface: &Surface, grid: &QuadratureGrid, input: &VariationInput) -> Result<Vec<f64>> {
    grid.check_owner(surface)?;
    let f = input.f.values(grid)?;
    if input.symmetric {
        check_even(grid, &f)?;
        if let Some(d) = &input.normal_derivative {
            check_even(grid, d)?;
        }
    }
    Ok(f)
}

pub(crate) fn check_even(grid: &QuadratureGrid, f: &[f64]) -> Result<()> {
    grid.check_len(f)?;
    let scale = f.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
    match grid.symmetry_defect(f) {
        None => Err(Error::NotSymmetric(f64::INFINITY)),
        Some(d) if d > 1e-9 * scale => Err(Error::NotSymmetric(d)),
        Some(_) => Ok(()),
    }
}

fn normal_derivative(grid: &QuadratureGrid, input: &VariationInput) -> Result<Vec<f64>> {
    let d = input.normal_derivative.clone().ok_or(Error::MissingNormalDerivative)?;
    grid.check_len(&d)?;
    Ok(d)
}

pub fn first_variation(surface: &Surface, grid: &QuadratureGrid, input: &VariationInput) -> Result<FirstVariation> {
    let f = prepare(surface, grid, input)?;
    let n = grid.dim as f64;
    let h = input.h;
    let (mut dv, mut dp) = (0.0, 0.0);
    for ((p, w), fv) in grid.points.iter().zip(&grid.weight).zip(&f) {
        let xn = p.support();
        dv += (fv - 0.5 * h * xn) * w;
        dp += (fv * (p.h - xn) + 0.5 * h * (p.norm_sq() - n)) * w;
    }
    Ok(FirstVariation { volume: dv, perimeter: dp })
}

/// Second derivative of Gaussian perimeter at `s = 0`.
pub fn second_variation_perimeter(surface: &Surface, grid: &QuadratureGrid, input: &VariationInput) -> Result<f64> {
    prepare(surface, grid, input)?;
    let dn = normal_derivative(grid, input)?;
    let js = jets(grid, &input.f)?;
    let lf = l_from_jets(grid, &js);
    let n = grid.dim as f64;
    let (h, hp) = (input.h, input.h_prime);
    let mut acc = 0.0;
    for i in 0..grid.len() {
        let p = &grid.points[i];
        let f = js[i].val;
        let (xn, x2) = (p.support(), p.norm_sq());
        let drift = p.h - xn;
        let first = f * drift + 0.5 * h * (x2 - n);
        let v = -f * lf[i] + 2.0 * h * f * xn - h * h * (x2 - 0.5 * n) + first * first + f * dn[i] * drift + 0.5 * hp * (x2 - n);
        acc += v * grid.weight[i];
    }
    Ok(acc)
}

/// Second derivative of Gaussian volume at `s = 0`.
pub fn second_variation_volume(surface: &Surface, grid: &QuadratureGrid, input: &VariationInput) -> Result<f64> {
    let f = prepare(surface, grid, input)?;
    let dn = normal_derivative(grid, input)?;
    let m = grid.ambient_dim() as f64;
    let (h, hp) = (input.h, input.h_prime);
    let mut acc = 0.0;
    for i in 0..grid.len() {
        let p = &grid.points[i];
        let (xn, x2) = (p.support(), p.norm_sq());
        let fv = f[i];
        let v = fv * (dn[i] + fv * p.h - fv * xn) + 0.5 * h * h * xn - 0.5 * hp * xn + h * (fv - 0.25 * h * xn) * (x2 - m);
        acc += v * grid.weight[i];
    }
    Ok(acc)
}
