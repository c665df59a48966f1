//! Residuals of the pointwise and integral identities satisfied by the
//! stability operator on lambda-hypersurfaces.

use super::field::{jets, Field, Jet};
use super::operator::{cal_l_from_jets, l_from_jets};
use crate::error::{Error, Result};
use crate::geometry::{AntisymmetricGenerator, Layout, QuadratureGrid, ResidualStats, Surface};
use crate::linalg::dot;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Largest `lambda_residual` accepted as a lambda-hypersurface.
pub const LAMBDA_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IdentityId {
    /// `L H = 2H + lambda ||A||^2`.
    #[serde(rename = "LH")]
    Lh,
    /// `L A = 2A - lambda A^2`.
    #[serde(rename = "LA")]
    La,
    /// `L <v,N> = <v,N>`.
    #[serde(rename = "LINEAR")]
    Linear,
    /// `L <Qx,N> = 0`.
    #[serde(rename = "ROTATION")]
    Rotation,
    /// Product rule for `L`.
    #[serde(rename = "PRODUCT")]
    Product,
    /// `||A|| L ||A|| = 2||A||^2 - lambda tr A^3 + |grad A|^2 - |grad ||A|| |^2`.
    #[serde(rename = "SIMONS")]
    Simons,
    /// `calL |x|^2 / 2 = n - |x|^2 - lambda <x,N>`.
    #[serde(rename = "SOLITON_X2")]
    SolitonX2,
    #[serde(rename = "INT_X2")]
    IntX2,
    #[serde(rename = "INT_X4")]
    IntX4,
    #[serde(rename = "INT_VAR")]
    IntVar,
    /// `int f calL g gamma = -int <grad f, grad g> gamma`.
    #[serde(rename = "IBP")]
    Ibp,
    /// `int <Qx,N> gamma = 0`.
    #[serde(rename = "ROT_MEAN")]
    RotMean,
}

impl IdentityId {
    pub const ALL: [IdentityId; 12] = [
        IdentityId::Lh,
        IdentityId::La,
        IdentityId::Linear,
        IdentityId::Rotation,
        IdentityId::Product,
        IdentityId::Simons,
        IdentityId::SolitonX2,
        IdentityId::IntX2,
        IdentityId::IntX4,
        IdentityId::IntVar,
        IdentityId::Ibp,
        IdentityId::RotMean,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::Lh => "LH",
            IdentityId::La => "LA",
            IdentityId::Linear => "LINEAR",
            IdentityId::Rotation => "ROTATION",
            IdentityId::Product => "PRODUCT",
            IdentityId::Simons => "SIMONS",
            IdentityId::SolitonX2 => "SOLITON_X2",
            IdentityId::IntX2 => "INT_X2",
            IdentityId::IntX4 => "INT_X4",
            IdentityId::IntVar => "INT_VAR",
            IdentityId::Ibp => "IBP",
            IdentityId::RotMean => "ROT_MEAN",
        }
    }

    /// Whether the identity assumes `H = <x,N> + lambda`.
    pub fn needs_lambda_surface(self) -> bool {
        !matches!(self, IdentityId::Product | IdentityId::Ibp | IdentityId::RotMean)
    }

    pub fn is_integral(self) -> bool {
        matches!(self, IdentityId::IntX2 | IdentityId::IntX4 | IdentityId::IntVar | IdentityId::Ibp | IdentityId::RotMean)
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL.into_iter().find(|id| id.as_str().eq_ignore_ascii_case(s)).ok_or_else(|| Error::InvalidParameter(format!("unknown identity `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: IdentityId,
    /// Max-norm residual over nodes, or the absolute defect of an integral identity.
    pub max_residual: f64,
    /// Gaussian-weighted RMS residual; equals `max_residual` for integral identities.
    pub l2_residual: f64,
    /// Number of grid nodes.
    pub grid: usize,
}

/// Evaluates one identity on `grid` with the constant `lambda`.
pub fn check_identity(surface: &Surface, lambda: f64, id: IdentityId, grid: &QuadratureGrid) -> Result<IdentityReport> {
    grid.check_owner(surface)?;
    if id.needs_lambda_surface() {
        let stats = surface.lambda_residual(lambda, grid)?;
        if !(stats.max <= LAMBDA_TOLERANCE) {
            return Err(Error::NotLambdaSurface(stats.max));
        }
    }
    let n = grid.dim as f64;
    let report = |res: Vec<f64>| {
        let s = ResidualStats::from_samples(&res, &grid.weight);
        IdentityReport { identity: id, max_residual: s.max, l2_residual: s.l2, grid: grid.len() }
    };
    let scalar = |d: f64| IdentityReport { identity: id, max_residual: d.abs(), l2_residual: d.abs(), grid: grid.len() };
    let is_profile = matches!(grid.layout, Layout::Profile { .. });
    let amb = grid.ambient_dim();
    Ok(match id {
        IdentityId::Lh => {
            let js = jets(grid, &Field::MeanCurvature)?;
            let lh = l_from_jets(grid, &js);
            report(grid.points.iter().zip(&lh).map(|(p, l)| l - (2.0 * p.h + lambda * p.a_norm2)).collect())
        }
        IdentityId::La => {
            if grid.round.is_some() {
                // A is parallel, so L acts on each principal value as multiplication
                report(
                    grid.points
                        .iter()
                        .map(|p| p.principal.iter().map(|a| (p.a_norm2 + 1.0) * a - (2.0 * a - lambda * a * a)).fold(0.0f64, |m, r| m.max(r.abs())))
                        .collect(),
                )
            } else if matches!(grid.layout, Layout::Cyclic { .. }) {
                let a: Vec<f64> = grid.points.iter().map(|p| p.principal[0]).collect();
                let js = jets(grid, &Field::Samples(a.clone()))?;
                let la = l_from_jets(grid, &js);
                report(a.iter().zip(&la).map(|(a, l)| l - (2.0 * a - lambda * a * a)).collect())
            } else {
                return Err(Error::UnsupportedSurface("LA is checked on round surfaces and curves".into()));
            }
        }
        IdentityId::Linear => {
            let mut worst = vec![0.0f64; grid.len()];
            for i in 0..amb {
                if is_profile && i + 1 != amb {
                    continue;
                }
                let mut v = vec![0.0; amb];
                v[i] = 1.0;
                let js = jets(grid, &Field::NormalDot(v))?;
                let lf = l_from_jets(grid, &js);
                for ((w, j), l) in worst.iter_mut().zip(&js).zip(&lf) {
                    if (l - j.val).abs() > w.abs() {
                        *w = l - j.val;
                    }
                }
            }
            report(worst)
        }
        IdentityId::Rotation => {
            let mut worst = vec![0.0f64; grid.len()];
            for (i, j) in planes(amb, is_profile) {
                let js = jets(grid, &Field::Rotation(AntisymmetricGenerator::plane(amb, i, j)))?;
                let lf = l_from_jets(grid, &js);
                for (w, l) in worst.iter_mut().zip(&lf) {
                    if l.abs() > w.abs() {
                        *w = *l;
                    }
                }
            }
            report(worst)
        }
        IdentityId::Product => {
            let (f, g) = test_pair(amb);
            let (jf, jg) = (jets(grid, &f)?, jets(grid, &g)?);
            let jfg = jets(grid, &Field::product(f, g))?;
            let (lf, lg, lfg) = (l_from_jets(grid, &jf), l_from_jets(grid, &jg), l_from_jets(grid, &jfg));
            report(
                (0..grid.len())
                    .map(|i| {
                        let (a, b) = (&jf[i], &jg[i]);
                        let rhs = a.val * lg[i] + b.val * lf[i] + 2.0 * dot(&a.grad, &b.grad) - (grid.points[i].a_norm2 + 1.0) * a.val * b.val;
                        lfg[i] - rhs
                    })
                    .collect(),
            )
        }
        IdentityId::Simons => {
            let lhs_rhs = |js: &[Jet], grad_terms: &dyn Fn(usize) -> f64| -> Vec<f64> {
                let l = l_from_jets(grid, js);
                (0..grid.len())
                    .map(|i| {
                        let p = &grid.points[i];
                        js[i].val * l[i] - (2.0 * p.a_norm2 - lambda * p.trace_a3() + grad_terms(i))
                    })
                    .collect()
            };
            if grid.round.is_some() {
                report(lhs_rhs(&jets(grid, &Field::NormA)?, &|_| 0.0))
            } else if matches!(grid.layout, Layout::Cyclic { .. }) {
                let k: Vec<f64> = grid.points.iter().map(|p| p.principal[0]).collect();
                let (lo, hi) = k.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
                if lo * hi <= 0.0 {
                    return Err(Error::Precondition("SIMONS on curves needs curvature of one sign".into()));
                }
                // on curves |grad A| = |grad ||A|| | wherever the curvature has one sign
                let js = jets(grid, &Field::Samples(k.iter().map(|v| v.abs()).collect()))?;
                report(lhs_rhs(&js, &|_| 0.0))
            } else {
                return Err(Error::UnsupportedSurface("SIMONS is checked on round surfaces and curves".into()));
            }
        }
        IdentityId::SolitonX2 => {
            let js = jets(grid, &Field::NormSq)?;
            let cl = cal_l_from_jets(grid, &js);
            report(grid.points.iter().zip(&cl).map(|(p, c)| 0.5 * c - (n - p.norm_sq() - lambda * p.support())).collect())
        }
        IdentityId::IntX2 => scalar(grid.integrate_with(|p| n - p.norm_sq() - lambda * p.h + lambda * lambda)),
        IdentityId::IntX4 => scalar(grid.integrate_with(|p| {
            let (x2, hl) = (p.norm_sq(), p.h - lambda);
            (n + 2.0) * x2 - x2 * x2 - lambda * x2 * hl - 2.0 * hl * hl
        })),
        IdentityId::IntVar => scalar(grid.integrate_with(|p| {
            let (x2, hl) = (p.norm_sq(), p.h - lambda);
            (x2 - n).powi(2) - (2.0 * n + hl * (-2.0 * p.h + lambda * (n - x2)))
        })),
        IdentityId::Ibp => {
            let (f, g) = test_pair(amb);
            let (jf, jg) = (jets(grid, &f)?, jets(grid, &g)?);
            let cg = cal_l_from_jets(grid, &jg);
            let integrand: Vec<f64> = (0..grid.len()).map(|i| jf[i].val * cg[i] + dot(&jf[i].grad, &jg[i].grad)).collect();
            scalar(grid.integrate(&integrand))
        }
        IdentityId::RotMean => {
            let mut worst = 0.0f64;
            for (i, j) in planes(amb, false) {
                let q = Field::Rotation(AntisymmetricGenerator::plane(amb, i, j));
                worst = worst.max(grid.integrate(&q.values(grid)?).abs());
            }
            scalar(worst)
        }
    })
}

/// Runs several identities, skipping none: errors are returned per entry.
pub fn check_identities(surface: &Surface, lambda: f64, ids: &[IdentityId], grid: &QuadratureGrid) -> Vec<(IdentityId, Result<IdentityReport>)> {
    ids.iter().map(|&id| (id, check_identity(surface, lambda, id, grid))).collect()
}

fn planes(amb: usize, invariant_only: bool) -> Vec<(usize, usize)> {
    let top = if invariant_only { amb - 1 } else { amb };
    let mut out = Vec::new();
    for i in 0..top {
        for j in i + 1..top {
            out.push((i, j));
        }
    }
    out
}

/// Two rotation-invariant test functions (about the last axis), so the pair
/// works on every surface with a derivative path.
fn test_pair(amb: usize) -> (Field, Field) {
    let mut e = vec![0.0; amb];
    e[amb - 1] = 1.0;
    let f = Field::sum(Field::PositionDot(e), Field::Const(0.5));
    let g = Field::sum(Field::product(Field::NormSq, Field::Support), Field::scale(0.3, Field::NormSq));
    (f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_surface, SurfaceSpec};

    fn all_on(spec: SurfaceSpec, lambda: f64, res: usize, tol: f64) {
        let s = make_surface(spec.clone()).unwrap();
        let g = s.grid(res).unwrap();
        for id in IdentityId::ALL {
            let r = check_identity(&s, lambda, id, &g).unwrap();
            assert!(r.max_residual < tol, "{spec:?} {id}: {}", r.max_residual);
        }
    }

    #[test]
    fn closed_form_surfaces_satisfy_every_identity() {
        all_on(SurfaceSpec::Sphere { r: 2f64.sqrt(), n: 2 }, 0.0, 1024, 1e-10);
        all_on(SurfaceSpec::Sphere { r: 1.3, n: 3 }, 3.0 / 1.3 - 1.3, 1024, 1e-10);
        all_on(SurfaceSpec::Cylinder { r: 1.0, k: 1, n: 2 }, 0.0, 1024, 1e-10);
        all_on(SurfaceSpec::Cylinder { r: 0.7, k: 2, n: 3 }, 2.0 / 0.7 - 0.7, 2048, 1e-9);
        all_on(SurfaceSpec::Strip { t: 0.4, n: 2 }, -0.4, 256, 1e-10);
    }

    #[test]
    fn lh_on_cylinder_is_algebraic() {
        let (r, k) = (1.7, 2);
        let s = make_surface(SurfaceSpec::Cylinder { r, k, n: 4 }).unwrap();
        let g = s.grid(512).unwrap();
        let lam = k as f64 / r - r;
        let rep = check_identity(&s, lam, IdentityId::Lh, &g).unwrap();
        assert!(rep.max_residual < 1e-12);
    }

    #[test]
    fn lambda_precondition() {
        let s = make_surface(SurfaceSpec::Sphere { r: 1.0, n: 2 }).unwrap();
        let g = s.grid(256).unwrap();
        assert!(matches!(check_identity(&s, 0.0, IdentityId::Lh, &g), Err(Error::NotLambdaSurface(_))));
        assert!(check_identity(&s, 0.0, IdentityId::Product, &g).is_ok());
    }

    #[test]
    fn complement_orientation_is_consistent() {
        let s = make_surface(SurfaceSpec::Sphere { r: 1.5, n: 2 }).unwrap().with_complement(true);
        let g = s.grid(512).unwrap();
        let lam = -(2.0 / 1.5 - 1.5);
        for id in IdentityId::ALL {
            let r = check_identity(&s, lam, id, &g).unwrap();
            assert!(r.max_residual < 1e-10, "{id}: {}", r.max_residual);
        }
    }

    #[test]
    fn identity_names_round_trip() {
        for id in IdentityId::ALL {
            assert_eq!(id.as_str().parse::<IdentityId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{id}\""));
        }
        assert!("nope".parse::<IdentityId>().is_err());
    }
}
