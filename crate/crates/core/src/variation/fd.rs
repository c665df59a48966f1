//! Finite-difference cross-check of the second variation of perimeter: the
//! varied surface is rebuilt, integrated, and differenced in `s`.

use super::formulas::{first_variation, second_variation_perimeter, VariationInput};
use crate::error::{Error, Result};
use crate::geometry::grid::gaussian_density;
use crate::geometry::{Layout, PlanarCurve, QuadratureGrid, Surface};
use crate::linalg::dot;
use crate::stability::field::jets;
use serde::Serialize;

/// One step size of the comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdRow {
    pub s: f64,
    /// Central first difference of perimeter.
    pub fd_first: f64,
    /// Central second difference of perimeter.
    pub fd_second: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdReport {
    pub formula_first: f64,
    pub formula_second: f64,
    pub rows: Vec<FdRow>,
}

impl FdReport {
    /// Smallest relative error over the step sizes.
    pub fn best_relative_error(&self) -> f64 {
        self.rows.iter().map(|r| r.relative_error).fold(f64::INFINITY, f64::min)
    }
}

/// Gaussian perimeter of `(x + s f N) / sqrt(t_s)` with `t_s = 1 + h s + h' s^2 / 2`.
///
/// Closed curves are rebuilt node by node; round surfaces accept fields on the
/// spherical factor and are integrated as radial graphs.
pub fn varied_perimeter(grid: &QuadratureGrid, f: &[f64], grad: &[Vec<f64>], s: f64, h: f64, h_prime: f64) -> Result<f64> {
    let t = 1.0 + h * s + 0.5 * h_prime * s * s;
    if t <= 0.0 {
        return Err(Error::InvalidParameter(format!("dilation factor {t} is not positive")));
    }
    if let Some(m) = &grid.round {
        let k = m.k as i32;
        let mut acc = 0.0;
        for i in 0..grid.len() {
            let rho = (m.r + m.sign * s * f[i]) / t.sqrt();
            if rho <= 0.0 {
                return Err(Error::SelfIntersection(format!("radius {rho} at node {i}")));
            }
            let g2 = s * s * m.r * m.r * dot(&grad[i], &grad[i]) / t;
            let ratio = (-0.5 * (rho * rho - m.r * m.r)).exp() * rho.powi(k - 1) * (rho * rho + g2).sqrt() / m.r.powi(k);
            acc += grid.weight[i] * ratio;
        }
        return Ok(acc);
    }
    if let Layout::Cyclic { .. } = grid.layout {
        let pts: Vec<[f64; 2]> = grid.points.iter().zip(f).map(|(p, fv)| [p.x[0] + s * fv * p.normal[0], p.x[1] + s * fv * p.normal[1]]).collect();
        let c = PlanarCurve::from_periodic_samples(pts, false)?;
        let scale = 1.0 / t.sqrt();
        // the ambient weight in R^2 carries (2 pi)^-1; a curve carries one factor of the length scale
        return Ok(scale * c.weighted_length(|y| gaussian_density(&[y[0] * scale, y[1] * scale])));
    }
    Err(Error::UnsupportedSurface("the finite-difference check rebuilds closed curves and round surfaces only".into()))
}

/// Compares the second-variation formula (with `grad_N f = 0`, the straight
/// normal-line extension) against central differences of the rebuilt perimeter.
pub fn fd_variation_check(surface: &Surface, grid: &QuadratureGrid, input: &VariationInput, steps: &[f64]) -> Result<FdReport> {
    grid.check_owner(surface)?;
    let input = input.clone().straight(grid);
    let js = jets(grid, &input.f)?;
    let f: Vec<f64> = js.iter().map(|j| j.val).collect();
    let grad: Vec<Vec<f64>> = js.iter().map(|j| j.grad.clone()).collect();
    if let Some(m) = &grid.round {
        // the radial-graph integration needs f constant along the flat factor
        let scale = f.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for g in &grad {
            if g[m.k + 1..].iter().any(|v| v.abs() > 1e-10 * scale) {
                return Err(Error::UnsupportedSurface("field varies along the flat factor".into()));
            }
        }
    }
    let fmax = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let amax = grid.points.iter().map(|p| p.a_op2.sqrt()).fold(0.0f64, f64::max);
    let formula_first = first_variation(surface, grid, &input)?.perimeter;
    let formula_second = second_variation_perimeter(surface, grid, &input)?;
    let base = varied_perimeter(grid, &f, &grad, 0.0, 0.0, 0.0)?;
    let mut rows = Vec::with_capacity(steps.len());
    for &s in steps {
        if !(s > 0.0) {
            return Err(Error::InvalidParameter(format!("step {s} must be positive")));
        }
        if s * fmax * amax >= 0.5 {
            return Err(Error::SelfIntersection(format!("s max|f| max|A| = {:.3} is not below 0.5", s * fmax * amax)));
        }
        let plus = varied_perimeter(grid, &f, &grad, s, input.h, input.h_prime)?;
        let minus = varied_perimeter(grid, &f, &grad, -s, input.h, input.h_prime)?;
        let fd_first = (plus - minus) / (2.0 * s);
        let fd_second = (plus - 2.0 * base + minus) / (s * s);
        let relative_error = (fd_second - formula_second).abs() / formula_second.abs().max(1e-12);
        rows.push(FdRow { s, fd_first, fd_second, relative_error });
    }
    Ok(FdReport { formula_first, formula_second, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::poly::Poly;
    use crate::geometry::{make_surface, PlanarCurve, SurfaceSpec};
    use crate::stability::field::Field;
    use std::f64::consts::PI;

    fn cos2(g: &QuadratureGrid) -> Field {
        Field::Samples(g.points.iter().map(|p| (2.0 * p.x[1].atan2(p.x[0])).cos()).collect())
    }

    #[test]
    fn circle_cos2_matches_and_has_known_value() {
        let s = make_surface(SurfaceSpec::Curve { curve: PlanarCurve::circle(1.0, 2048).unwrap() }).unwrap();
        let g = s.grid(2048).unwrap();
        let f = cos2(&g);
        let rep = fd_variation_check(&s, &g, &VariationInput::new(f.clone()), &[1e-3]).unwrap();
        assert!(rep.rows[0].relative_error < 1e-4, "{rep:?}");
        // L cos 2theta = -2 cos 2theta on the unit circle, and H = <x,N> there
        let f2: f64 = g.integrate(&f.values(&g).unwrap().iter().map(|v| v * v).collect::<Vec<_>>());
        assert!((rep.formula_second - 2.0 * f2).abs() < 1e-8);
    }

    #[test]
    fn constant_speed_on_sphere_matches_radius_derivative() {
        // perimeter of r S^n: |S^n| r^n (2 pi)^{-(n+1)/2} e^{-r^2/2}
        let (r, n, c) = (1.3, 2, 0.7);
        let s = make_surface(SurfaceSpec::Sphere { r, n }).unwrap();
        let g = s.grid(256).unwrap();
        let rep = fd_variation_check(&s, &g, &VariationInput::new(Field::Const(c)), &[1e-3]).unwrap();
        let p = |r: f64| 4.0 * PI * r * r * (2.0 * PI).powf(-1.5) * (-0.5 * r * r).exp();
        // d^2/dr^2 of p, by hand
        let d2 = p(r) * ((2.0 / r - r).powi(2) - 2.0 / (r * r) - 1.0);
        assert!((rep.formula_second - c * c * d2).abs() < 1e-12);
        assert!(rep.rows[0].relative_error < 1e-5);
    }

    #[test]
    fn dilated_harmonic_on_sphere() {
        let s = make_surface(SurfaceSpec::Sphere { r: 2.0, n: 2 }).unwrap();
        let g = s.grid(1024).unwrap();
        let f = Field::Poly(Poly::coord(3, 0).mul(&Poly::coord(3, 2)).scale(0.25));
        let rep = fd_variation_check(&s, &g, &VariationInput::new(f).with_dilation(0.3, -0.2), &[1e-3, 5e-4]).unwrap();
        assert!(rep.best_relative_error() < 1e-4, "{rep:?}");
        assert!((rep.rows[0].fd_first - rep.formula_first).abs() < 1e-6);
    }

    #[test]
    fn zero_field_gives_zero() {
        let s = make_surface(SurfaceSpec::Sphere { r: 1.0, n: 1 }).unwrap();
        let g = s.grid(128).unwrap();
        let rep = fd_variation_check(&s, &g, &VariationInput::new(Field::Const(0.0)), &[1e-2]).unwrap();
        assert_eq!(rep.formula_second, 0.0);
        assert!(rep.rows[0].fd_second.abs() < 1e-10);
    }

    #[test]
    fn large_steps_are_refused() {
        let s = make_surface(SurfaceSpec::Sphere { r: 0.5, n: 2 }).unwrap();
        let g = s.grid(128).unwrap();
        let r = fd_variation_check(&s, &g, &VariationInput::new(Field::Const(1.0)), &[0.3]);
        assert!(matches!(r, Err(Error::SelfIntersection(_))));
    }

    #[test]
    fn flat_dependence_is_unsupported() {
        let s = make_surface(SurfaceSpec::Cylinder { r: 1.0, k: 1, n: 2 }).unwrap();
        let g = s.grid(256).unwrap();
        let r = fd_variation_check(&s, &g, &VariationInput::new(Field::PositionDot(vec![0.0, 0.0, 1.0])), &[1e-3]);
        assert!(matches!(r, Err(Error::UnsupportedSurface(_))));
    }
}
