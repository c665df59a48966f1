//! The drift Laplacian `calL f = Delta f - <x, grad f>` and the stability
//! operator `L f = calL f + (||A||^2 + 1) f`.

use super::field::{jets, Field, Jet};
use crate::error::Result;
use crate::geometry::QuadratureGrid;
use crate::linalg::dot;
use serde::Serialize;

/// Nodal values of a function on one grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSamples {
    pub surface_id: u64,
    pub values: Vec<f64>,
    /// Tangential gradients as ambient vectors, when known.
    pub gradient: Option<Vec<Vec<f64>>>,
}

impl FieldSamples {
    pub fn into_field(self) -> Field {
        Field::Samples(self.values)
    }

    /// Largest value of `|f(x) - f(-x)|` over antipodal pairs.
    pub fn symmetry_defect(&self, grid: &QuadratureGrid) -> Option<f64> {
        grid.symmetry_defect(&self.values)
    }
}

pub(crate) fn cal_l_from_jets(grid: &QuadratureGrid, js: &[Jet]) -> Vec<f64> {
    js.iter().zip(&grid.points).map(|(j, p)| j.lap - dot(&p.x, &j.grad)).collect()
}

pub(crate) fn l_from_jets(grid: &QuadratureGrid, js: &[Jet]) -> Vec<f64> {
    cal_l_from_jets(grid, js).into_iter().zip(js.iter().zip(&grid.points)).map(|(c, (j, p))| c + (p.a_norm2 + 1.0) * j.val).collect()
}

fn samples(grid: &QuadratureGrid, values: Vec<f64>) -> FieldSamples {
    FieldSamples { surface_id: grid.surface_id, values, gradient: None }
}

/// `calL f = Delta f - <x, grad f>` at every node.
pub fn apply_cal_l(grid: &QuadratureGrid, f: &Field) -> Result<FieldSamples> {
    let js = jets(grid, f)?;
    Ok(samples(grid, cal_l_from_jets(grid, &js)))
}

/// `L f = Delta f - <x, grad f> + (||A||^2 + 1) f` at every node.
pub fn apply_l(grid: &QuadratureGrid, f: &Field) -> Result<FieldSamples> {
    let js = jets(grid, f)?;
    Ok(samples(grid, l_from_jets(grid, &js)))
}

/// Values and tangential gradients of `f`.
pub fn sample_with_gradient(grid: &QuadratureGrid, f: &Field) -> Result<FieldSamples> {
    let js = jets(grid, f)?;
    let values = js.iter().map(|j| j.val).collect();
    Ok(FieldSamples { surface_id: grid.surface_id, values, gradient: Some(js.into_iter().map(|j| j.grad).collect()) })
}

/// `int f L f gamma`.
pub fn quadratic_value(grid: &QuadratureGrid, f: &Field) -> Result<f64> {
    let js = jets(grid, f)?;
    let lf = l_from_jets(grid, &js);
    Ok(grid.integrate(&js.iter().zip(&lf).map(|(j, l)| j.val * l).collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::poly::Poly;
    use crate::geometry::{make_surface, PlanarCurve, SurfaceSpec};
    use std::f64::consts::PI;

    fn grid(spec: SurfaceSpec, res: usize) -> QuadratureGrid {
        make_surface(spec).unwrap().grid(res).unwrap()
    }

    fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
        v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn constants_on_spheres() {
        let (r, n) = (1.4, 3);
        let g = grid(SurfaceSpec::Sphere { r, n }, 512);
        let lf = apply_l(&g, &Field::Const(1.0)).unwrap();
        assert!(max_abs(lf.values.iter().map(|v| v - (n as f64 / (r * r) + 1.0))) < 1e-14);
        assert!(max_abs(apply_cal_l(&g, &Field::Const(1.0)).unwrap().values) == 0.0);
    }

    #[test]
    fn normal_components_on_spheres() {
        for n in 1..=3 {
            let r = 0.8 + n as f64 * 0.3;
            let g = grid(SurfaceSpec::Sphere { r, n }, 512);
            let mut v = vec![0.0; n + 1];
            v[0] = 0.6;
            v[n] = 0.8;
            let f = Field::NormalDot(v);
            let vals = f.values(&g).unwrap();
            let lf = apply_l(&g, &f).unwrap().values;
            let cl = apply_cal_l(&g, &f).unwrap().values;
            assert!(max_abs(lf.iter().zip(&vals).map(|(a, b)| a - b)) < 1e-8);
            let k = n as f64 / (r * r);
            assert!(max_abs(cl.iter().zip(&vals).map(|(a, b)| a + k * b)) < 1e-8);
        }
    }

    #[test]
    fn circle_second_harmonic() {
        let c = PlanarCurve::circle(1.0, 1024).unwrap();
        let g = grid(SurfaceSpec::Curve { curve: c }, 1024);
        let vals: Vec<f64> = (0..1024).map(|j| (2.0 * 2.0 * PI * j as f64 / 1024.0).cos()).collect();
        let lf = apply_l(&g, &Field::Samples(vals.clone())).unwrap().values;
        assert!(max_abs(lf.iter().zip(&vals).map(|(a, b)| a + 2.0 * b)) < 1e-8);
    }

    #[test]
    fn strip_tangential_coordinate_is_an_ou_eigenfunction() {
        let g = grid(SurfaceSpec::Strip { t: 0.7, n: 2 }, 256);
        let f = Field::PositionDot(vec![0.0, 1.0, 0.0]);
        let vals = f.values(&g).unwrap();
        let cl = apply_cal_l(&g, &f).unwrap().values;
        assert!(max_abs(cl.iter().zip(&vals).map(|(a, b)| a + b)) < 1e-13);
    }

    #[test]
    fn degree_two_harmonic_at_threshold_radius() {
        // x1 x2 is a degree-2 harmonic; at r = sqrt(n+2) its L-eigenvalue is 0
        let n = 2;
        let r = ((n + 2) as f64).sqrt();
        let g = grid(SurfaceSpec::Sphere { r, n }, 1024);
        let f = Field::Poly(Poly::coord(3, 0).mul(&Poly::coord(3, 1)));
        assert!(max_abs(apply_l(&g, &f).unwrap().values) < 1e-12);
        assert!(quadratic_value(&g, &f).unwrap().abs() < 1e-14);
    }

    #[test]
    fn gradients_are_tangent() {
        let g = grid(SurfaceSpec::Cylinder { r: 1.1, k: 2, n: 3 }, 512);
        let s = sample_with_gradient(&g, &Field::NormSq).unwrap();
        for (gr, p) in s.gradient.unwrap().iter().zip(&g.points) {
            assert!(dot(gr, &p.normal).abs() < 1e-13);
        }
    }
}
