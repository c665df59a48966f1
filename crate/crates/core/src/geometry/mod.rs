//! Candidate hypersurfaces in `R^{n+1}` and their pointwise differential
//! geometry.
//!
//! Conventions: the normal points away from the enclosed solid and the second
//! fundamental form is `a_ij = <grad_{e_i} e_j, N>`, so `H = -tr A` and the
//! sphere of radius `r` has `H = n / r`.

pub mod curve;
pub mod grid;
pub mod poly;
pub mod profile;
pub mod text;

pub use curve::{CurveFrame, FdOrder, PlanarCurve};
pub use grid::{quadrature_grid, Layout, QuadratureGrid, RoundModel};
pub use profile::RevolutionProfile;

use crate::error::{Error, Result};
use crate::linalg::{dot, jacobi_eigen};
use serde::Serialize;
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};

/// Tagged description of a candidate hypersurface. `n` is always the surface
/// dimension; the ambient space is `R^{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceSpec {
    /// `r S^n`.
    Sphere {
        r: f64,
        n: usize,
    },
    /// `r S^k x R^{n-k}`, curved factor in the first `k + 1` coordinates.
    Cylinder {
        r: f64,
        k: usize,
        n: usize,
    },
    /// The hyperplanes `{x_1 = t}` and `{x_1 = -t}`.
    Strip {
        t: f64,
        n: usize,
    },
    /// `sum (x_i / a_i)^2 = 1`.
    Ellipsoid {
        axes: Vec<f64>,
    },
    Curve {
        curve: PlanarCurve,
    },
    /// A closed profile loop in the half-plane `rho > 0`, rotated about the
    /// last coordinate axis.
    Profile {
        profile: RevolutionProfile,
        n: usize,
    },
}

impl SurfaceSpec {
    pub fn dim(&self) -> usize {
        match self {
            Self::Sphere { n, .. } | Self::Cylinder { n, .. } | Self::Strip { n, .. } | Self::Profile { n, .. } => *n,
            Self::Ellipsoid { axes } => axes.len().saturating_sub(1),
            Self::Curve { .. } => 1,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim() + 1
    }

    /// Short tag used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Sphere { .. } => "sphere",
            Self::Cylinder { .. } => "cylinder",
            Self::Strip { .. } => "strip",
            Self::Ellipsoid { .. } => "ellipsoid",
            Self::Curve { .. } => "curve",
            Self::Profile { .. } => "profile",
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Sphere { r, .. } => positive(*r),
            Self::Cylinder { r, k, n } => {
                positive(*r)?;
                if k > n {
                    return Err(Error::InvalidParameter(format!("cylinder index k={k} exceeds n={n}")));
                }
                Ok(())
            }
            Self::Strip { t, .. } => positive(*t),
            Self::Ellipsoid { axes } => {
                if axes.len() < 2 {
                    return Err(Error::InvalidParameter("ellipsoid needs at least two semi-axes".into()));
                }
                axes.iter().try_for_each(|a| positive(*a))
            }
            Self::Curve { .. } => Ok(()),
            Self::Profile { n, .. } => {
                if *n < 2 {
                    return Err(Error::InvalidParameter("revolution surfaces need n >= 2".into()));
                }
                Ok(())
            }
        }
    }

    /// Reduces degenerate parameters to a canonical closed form: `k = n`
    /// cylinders are spheres and `k = 0` cylinders are strips.
    pub fn canonical(&self) -> SurfaceSpec {
        match *self {
            Self::Cylinder { r, k, n } if k == n => Self::Sphere { r, n },
            Self::Cylinder { r, k: 0, n } => Self::Strip { t: r, n },
            _ => self.clone(),
        }
    }

    fn fingerprint(&self, h: &mut impl Hasher) {
        self.kind().hash(h);
        let mut put = |v: f64| v.to_bits().hash(h);
        match self.canonical() {
            Self::Sphere { r, n } => {
                put(r);
                put(n as f64);
            }
            Self::Cylinder { r, k, n } => {
                put(r);
                put(k as f64);
                put(n as f64);
            }
            Self::Strip { t, n } => {
                put(t);
                put(n as f64);
            }
            Self::Ellipsoid { axes } => axes.iter().for_each(|a| put(*a)),
            Self::Curve { curve } => {
                put(curve.is_symmetric() as u8 as f64);
                curve.points().iter().for_each(|p| {
                    put(p[0]);
                    put(p[1]);
                })
            }
            Self::Profile { profile, n } => {
                put(n as f64);
                profile.curve().points().iter().for_each(|p| {
                    put(p[0]);
                    put(p[1]);
                })
            }
        }
    }
}

fn positive(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveRadius(r))
    }
}

/// A validated surface. The `complement` flag selects the boundary of the
/// complementary solid: same point set, opposite normal.
#[derive(Debug, Clone)]
pub struct Surface {
    spec: SurfaceSpec,
    complement: bool,
    id: u64,
}

/// Validates a spec and returns a surface handle.
pub fn make_surface(spec: SurfaceSpec) -> Result<Surface> {
    spec.validate()?;
    let spec = spec.canonical();
    Ok(Surface::from_parts(spec, false))
}

impl Surface {
    fn from_parts(spec: SurfaceSpec, complement: bool) -> Self {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        spec.fingerprint(&mut h);
        complement.hash(&mut h);
        Self { spec, complement, id: h.finish() }
    }

    pub fn with_complement(self, complement: bool) -> Self {
        Self::from_parts(self.spec, complement)
    }

    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    pub fn is_complement(&self) -> bool {
        self.complement
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.spec.ambient_dim()
    }

    /// Spheres, cylinders and strips, whose curvature fields are constant.
    pub fn is_round(&self) -> bool {
        matches!(self.spec, SurfaceSpec::Sphere { .. } | SurfaceSpec::Cylinder { .. } | SurfaceSpec::Strip { .. })
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self.spec, SurfaceSpec::Cylinder { .. } | SurfaceSpec::Strip { .. })
    }

    /// Invariance under `x -> -x`.
    pub fn is_symmetric(&self) -> bool {
        match &self.spec {
            SurfaceSpec::Curve { curve } => curve.is_symmetric(),
            SurfaceSpec::Profile { profile, .. } => profile.reflection().is_some(),
            _ => true,
        }
    }

    /// Round-surface model `(r, k)` with `N(x) = P_k x / r` for spheres,
    /// cylinders and strips.
    pub fn round_model(&self) -> Option<RoundModel> {
        let sign = if self.complement { -1.0 } else { 1.0 };
        match self.spec {
            SurfaceSpec::Sphere { r, n } => Some(RoundModel { r, k: n, n, sign }),
            SurfaceSpec::Cylinder { r, k, n } => Some(RoundModel { r, k, n, sign }),
            SurfaceSpec::Strip { t, n } => Some(RoundModel { r: t, k: 0, n, sign }),
            _ => None,
        }
    }

    /// Curvature data at intrinsic coordinates.
    ///
    /// Round factors `S^k` use hyperspherical angles `(theta_1, ..,
    /// theta_{k-1}, phi)` and `S^0` uses a sign `+-1`; flat factors append
    /// Euclidean coordinates. Ellipsoids use the angles of the unit sphere.
    /// Sampled curves take the periodic parameter `sigma` in `[0, 2 pi]` and
    /// are evaluated on their trigonometric interpolant; revolution profiles
    /// take `sigma` followed by the angles of `S^{n-1}`.
    pub fn curvature_at(&self, param: &[f64]) -> Result<CurvaturePoint> {
        let p = match &self.spec {
            SurfaceSpec::Sphere { .. } | SurfaceSpec::Cylinder { .. } | SurfaceSpec::Strip { .. } => {
                let m = self.round_model().expect("round surface");
                let need = m.k.max(1) + (m.n - m.k);
                check_len(param, need)?;
                let u = unit_sphere_point(m.k, &param[..m.k.max(1)])?;
                let mut x: Vec<f64> = u.iter().map(|v| m.r * v).collect();
                x.extend_from_slice(&param[m.k.max(1)..]);
                return Ok(m.point(x));
            }
            SurfaceSpec::Ellipsoid { axes } => {
                check_len(param, axes.len() - 1)?;
                let u = unit_sphere_point(axes.len() - 1, param)?;
                ellipsoid_point(axes, &u)
            }
            SurfaceSpec::Curve { curve } => {
                check_len(param, 1)?;
                let s = check_angle(param[0], 2.0 * PI)?;
                let (x, t, nrm, kappa) = curve.interpolate(s);
                CurvaturePoint::from_principal(x.to_vec(), nrm.to_vec(), vec![-kappa], vec![t.to_vec()])
            }
            SurfaceSpec::Profile { profile, n } => {
                check_len(param, 1 + (n - 1).max(1))?;
                let s = check_angle(param[0], 2.0 * PI)?;
                let omega = unit_sphere_point(n - 1, &param[1..])?;
                let (pz, t, nrm, kappa) = profile.curve().interpolate(s);
                profile::revolution_point(pz, t, nrm, kappa, &omega)
            }
        };
        Ok(if self.complement { p.flipped() } else { p })
    }

    pub fn grid(&self, resolution: usize) -> Result<QuadratureGrid> {
        quadrature_grid(self, resolution)
    }

    /// Statistics of `H - <x, N> - lambda` over the grid.
    pub fn lambda_residual(&self, lambda: f64, grid: &QuadratureGrid) -> Result<ResidualStats> {
        grid.check_owner(self)?;
        let r: Vec<f64> = grid.points.iter().map(|p| p.h - p.support() - lambda).collect();
        Ok(ResidualStats::from_samples(&r, &grid.weight))
    }
}

fn check_len(param: &[f64], need: usize) -> Result<()> {
    if param.len() != need {
        return Err(Error::ChartOutOfRange(format!("expected {need} coordinates, got {}", param.len())));
    }
    Ok(())
}

fn check_angle(a: f64, max: f64) -> Result<f64> {
    if !(0.0..=max).contains(&a) {
        return Err(Error::ChartOutOfRange(format!("angle {a} outside [0, {max}]")));
    }
    Ok(a)
}

/// Max, mean and Gaussian-weighted RMS of a residual field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualStats {
    pub max: f64,
    pub mean: f64,
    pub l2: f64,
}

impl ResidualStats {
    pub fn from_samples(r: &[f64], weight: &[f64]) -> Self {
        let max = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mean = r.iter().map(|v| v.abs()).sum::<f64>() / r.len().max(1) as f64;
        let wsum: f64 = weight.iter().sum();
        let l2 = (r.iter().zip(weight).map(|(v, w)| w * v * v).sum::<f64>() / wsum).sqrt();
        Self { max, mean, l2 }
    }
}

/// Second fundamental form data at one point of a hypersurface.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePoint {
    pub x: Vec<f64>,
    /// Exterior unit normal.
    pub normal: Vec<f64>,
    /// Mean curvature `-tr A`.
    pub h: f64,
    /// `||A||^2`.
    pub a_norm2: f64,
    /// `||A||_{2->2}^2`.
    pub a_op2: f64,
    /// Eigenvalues of `A`.
    pub principal: Vec<f64>,
    /// Unit principal directions, orthonormal and tangent.
    pub directions: Vec<Vec<f64>>,
}

impl CurvaturePoint {
    pub fn from_principal(x: Vec<f64>, normal: Vec<f64>, principal: Vec<f64>, directions: Vec<Vec<f64>>) -> Self {
        let h = -principal.iter().sum::<f64>();
        let a_norm2 = principal.iter().map(|a| a * a).sum();
        let a_op2 = principal.iter().fold(0.0f64, |m, a| m.max(a * a));
        Self { x, normal, h, a_norm2, a_op2, principal, directions }
    }

    /// `<x, N>`.
    pub fn support(&self) -> f64 {
        dot(&self.x, &self.normal)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.x, &self.x)
    }

    /// Tangential component `v - <v, N> N`.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let c = dot(v, &self.normal);
        v.iter().zip(&self.normal).map(|(a, b)| a - c * b).collect()
    }

    /// `A (Pi v)` as an ambient vector.
    pub fn shape_apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (a, e) in self.principal.iter().zip(&self.directions) {
            let c = a * dot(v, e);
            out.iter_mut().zip(e).for_each(|(o, ei)| *o += c * ei);
        }
        out
    }

    /// `tr A^3 = <A^2, A>`.
    pub fn trace_a3(&self) -> f64 {
        self.principal.iter().map(|a| a * a * a).sum()
    }

    /// The same point with the opposite orientation.
    pub fn flipped(&self) -> Self {
        Self {
            x: self.x.clone(),
            normal: self.normal.iter().map(|v| -v).collect(),
            h: -self.h,
            a_norm2: self.a_norm2,
            a_op2: self.a_op2,
            principal: self.principal.iter().map(|v| -v).collect(),
            directions: self.directions.clone(),
        }
    }
}

/// A real antisymmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AntisymmetricGenerator {
    dim: usize,
    q: Vec<f64>,
}

impl AntisymmetricGenerator {
    pub fn new(q: Vec<f64>, dim: usize) -> Result<Self> {
        if q.len() != dim * dim {
            return Err(Error::InvalidParameter(format!("expected {} entries, got {}", dim * dim, q.len())));
        }
        let scale = q.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..dim {
            for j in 0..dim {
                if (q[i * dim + j] + q[j * dim + i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidParameter(format!("entry ({i},{j}) breaks antisymmetry")));
                }
            }
        }
        Ok(Self { dim, q })
    }

    /// Infinitesimal rotation taking `e_i` towards `e_j`.
    pub fn plane(dim: usize, i: usize, j: usize) -> Self {
        let mut q = vec![0.0; dim * dim];
        q[j * dim + i] = 1.0;
        q[i * dim + j] = -1.0;
        Self { dim, q }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.q
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        crate::linalg::matvec(&self.q, self.dim, x)
    }
}

/// Point of the unit sphere `S^k` in `R^{k+1}` from hyperspherical angles.
pub fn unit_sphere_point(k: usize, angles: &[f64]) -> Result<Vec<f64>> {
    if k == 0 {
        let s = angles.first().copied().unwrap_or(f64::NAN);
        if s != 1.0 && s != -1.0 {
            return Err(Error::ChartOutOfRange(format!("S^0 coordinate must be +-1, got {s}")));
        }
        return Ok(vec![s]);
    }
    check_len(angles, k)?;
    for &t in &angles[..k - 1] {
        check_angle(t, PI)?;
    }
    check_angle(angles[k - 1], 2.0 * PI)?;
    let mut u = vec![0.0; k + 1];
    let mut s = 1.0;
    for j in 0..k - 1 {
        u[j] = s * angles[j].cos();
        s *= angles[j].sin();
    }
    u[k - 1] = s * angles[k - 1].cos();
    u[k] = s * angles[k - 1].sin();
    Ok(u)
}

/// Orthonormal basis of the orthogonal complement of the unit vector `nrm`.
pub fn tangent_basis(nrm: &[f64]) -> Vec<Vec<f64>> {
    let d = nrm.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    // start from coordinate vectors least aligned with the normal
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| nrm[a].abs().total_cmp(&nrm[b].abs()));
    for &i in &order {
        if basis.len() == d - 1 {
            break;
        }
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        for _ in 0..2 {
            let c = dot(&v, nrm);
            v.iter_mut().zip(nrm).for_each(|(a, b)| *a -= c * b);
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(a, bb)| *a -= c * bb);
            }
        }
        let l = dot(&v, &v).sqrt();
        if l > 1e-8 {
            basis.push(v.into_iter().map(|a| a / l).collect());
        }
    }
    basis
}

/// Ellipsoid point `x = D u` for `u` on the unit sphere.
pub(crate) fn ellipsoid_point(axes: &[f64], u: &[f64]) -> CurvaturePoint {
    let d = axes.len();
    let x: Vec<f64> = axes.iter().zip(u).map(|(a, v)| a * v).collect();
    let g: Vec<f64> = axes.iter().zip(u).map(|(a, v)| v / a).collect();
    let gn = dot(&g, &g).sqrt();
    let normal: Vec<f64> = g.iter().map(|v| v / gn).collect();
    let basis = tangent_basis(&normal);
    let n = d - 1;
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..d).map(|l| basis[i][l] * basis[j][l] / (axes[l] * axes[l])).sum();
            m[i * n + j] = -s / gn;
        }
    }
    let (vals, vecs) = jacobi_eigen(&m, n);
    let directions = vecs
        .iter()
        .map(|c| {
            let mut e = vec![0.0; d];
            for (ci, b) in c.iter().zip(&basis) {
                e.iter_mut().zip(b).for_each(|(a, bb)| *a += ci * bb);
            }
            e
        })
        .collect();
    CurvaturePoint::from_principal(x, normal, vals, directions)
}
