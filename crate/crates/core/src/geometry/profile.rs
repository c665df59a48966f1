//! Hypersurfaces of revolution generated by a closed profile loop.

use super::curve::PlanarCurve;
use super::CurvaturePoint;
use crate::error::{Error, Result};

/// A closed loop `s -> (rho(s), z(s))` with `rho > 0`, stored as a planar
/// curve in the `(rho, z)` half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct RevolutionProfile {
    curve: PlanarCurve,
}

impl RevolutionProfile {
    pub fn new(curve: PlanarCurve) -> Result<Self> {
        if let Some(p) = curve.points().iter().find(|p| !(p[0] > 0.0)) {
            return Err(Error::NonMonotoneProfile(format!("rho = {} at z = {}", p[0], p[1])));
        }
        if let Some((i, j)) = first_crossing(curve.points()) {
            return Err(Error::NonMonotoneProfile(format!("segments {i} and {j} cross")));
        }
        Ok(Self { curve })
    }

    /// Torus-like profile: circle of radius `a` centred at `(c, 0)`.
    pub fn circle(c: f64, a: f64, m: usize) -> Result<Self> {
        let curve = PlanarCurve::from_parametric(|t| [c + a * t.cos(), a * t.sin()], m, false)?;
        Self::new(curve)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Ok(Self { curve: self.curve.scaled(s)? })
    }

    pub fn curve(&self) -> &PlanarCurve {
        &self.curve
    }

    /// Index map `i -> i'` realising the reflection `(rho, z) -> (rho, -z)`
    /// on the nodes, if the profile has that symmetry.
    pub fn reflection(&self) -> Option<Vec<usize>> {
        let pts = self.curve.points();
        let m = pts.len();
        let tol = 1e-9 * self.curve.diameter().max(1.0);
        (0..m).find_map(|c| {
            let map: Vec<usize> = (0..m).map(|i| (c + m - i) % m).collect();
            let ok = (0..m).all(|i| {
                let (a, b) = (pts[i], pts[map[i]]);
                (a[0] - b[0]).abs() < tol && (a[1] + b[1]).abs() < tol
            });
            ok.then_some(map)
        })
    }
}

/// First pair of non-adjacent crossing segments of a closed polygon.
pub(crate) fn first_crossing(pts: &[[f64; 2]]) -> Option<(usize, usize)> {
    let m = pts.len();
    let seg = |i: usize| (pts[i], pts[(i + 1) % m]);
    let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    for i in 0..m {
        let (a, b) = seg(i);
        let (lo_x, hi_x) = (a[0].min(b[0]), a[0].max(b[0]));
        let (lo_y, hi_y) = (a[1].min(b[1]), a[1].max(b[1]));
        for j in i + 2..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (c, d) = seg(j);
            if c[0].max(d[0]) < lo_x || c[0].min(d[0]) > hi_x || c[1].max(d[1]) < lo_y || c[1].min(d[1]) > hi_y {
                continue;
            }
            let (o1, o2) = (orient(a, b, c), orient(a, b, d));
            let (o3, o4) = (orient(c, d, a), orient(c, d, b));
            if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
                return Some((i, j));
            }
        }
    }
    None
}

/// Curvature data at the point `(rho omega, z)` of the revolution surface,
/// from the profile point, tangent, exterior normal and signed curvature.
pub(crate) fn revolution_point(pz: [f64; 2], t: [f64; 2], nrm: [f64; 2], kappa: f64, omega: &[f64]) -> CurvaturePoint {
    let n = omega.len();
    let lift = |a: f64, b: f64| {
        let mut v: Vec<f64> = omega.iter().map(|w| a * w).collect();
        v.push(b);
        v
    };
    let x = lift(pz[0], pz[1]);
    let normal = lift(nrm[0], nrm[1]);
    let mut principal = vec![-kappa];
    let mut directions = vec![lift(t[0], t[1])];
    for e in super::tangent_basis(omega) {
        principal.push(-nrm[0] / pz[0]);
        let mut v = e;
        v.push(0.0);
        directions.push(v);
    }
    debug_assert_eq!(directions.len(), n);
    CurvaturePoint::from_principal(x, normal, principal, directions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_axis_crossing_and_self_intersection() {
        let c = PlanarCurve::from_parametric(|t| [0.5 + t.cos(), t.sin()], 32, false).unwrap();
        assert!(matches!(RevolutionProfile::new(c), Err(Error::NonMonotoneProfile(_))));
        // figure eight
        let c = PlanarCurve::from_parametric(|t| [3.0 + t.sin(), (2.0 * t).sin()], 64, false);
        if let Ok(c) = c {
            assert!(matches!(RevolutionProfile::new(c), Err(Error::NonMonotoneProfile(_))));
        }
    }

    #[test]
    fn torus_profile_is_reflection_symmetric() {
        let p = RevolutionProfile::circle(3.0, 1.0, 64).unwrap();
        let map = p.reflection().unwrap();
        assert_eq!(map[0], 0);
        assert_eq!(map[16], 48);
    }

    #[test]
    fn revolution_principal_curvatures_of_a_round_sphere_patch() {
        // a point of the unit circle profile seen as part of S^2
        let th: f64 = 0.6;
        let pz = [th.cos(), th.sin()];
        let p = revolution_point(pz, [-th.sin(), th.cos()], pz, 1.0, &[1.0, 0.0]);
        assert!((p.h - 2.0).abs() < 1e-14);
        assert!(p.principal.iter().all(|a| (a + 1.0).abs() < 1e-14));
    }
}
