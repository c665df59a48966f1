//! Quadrature grids carrying curvature data and Gaussian-weighted surface
//! measure at every node.
//!
//! Round factors `S^k` use Gauss-Legendre nodes in each polar angle and a
//! uniform azimuth; flat factors use Gauss-Hermite nodes, which absorb the
//! Gaussian weight exactly. Sampled curves use the periodic trapezoid rule.

use super::curve::{CurveFrame, FdOrder};
use super::{ellipsoid_point, profile, tangent_basis, CurvaturePoint, Surface, SurfaceSpec};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::quadrature::{gauss_gegenbauer, gauss_hermite};
use crate::special::sphere_area;
use std::f64::consts::PI;

/// Standard Gaussian density on `R^d`, `d = x.len()`.
pub fn gaussian_density(x: &[f64]) -> f64 {
    (-0.5 * dot(x, x)).exp() * (2.0 * PI).powf(-0.5 * x.len() as f64)
}

/// Closed-form description of `r S^k x R^{n-k}` with orientation `sign`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundModel {
    pub r: f64,
    pub k: usize,
    pub n: usize,
    /// `+1` for the exterior normal of the solid, `-1` for its complement.
    pub sign: f64,
}

impl RoundModel {
    /// Normal extended to all of `R^{n+1}` as the linear field `sign P_k x / r`.
    pub fn normal(&self, x: &[f64]) -> Vec<f64> {
        (0..=self.n).map(|i| if i <= self.k { self.sign * x[i] / self.r } else { 0.0 }).collect()
    }

    pub fn point(&self, x: Vec<f64>) -> CurvaturePoint {
        let normal = self.normal(&x);
        let mut principal = Vec::with_capacity(self.n);
        let mut directions = Vec::with_capacity(self.n);
        if self.k > 0 {
            let u: Vec<f64> = x[..=self.k].iter().map(|v| v / self.r).collect();
            for e in tangent_basis(&u) {
                let mut v = e;
                v.resize(self.n + 1, 0.0);
                directions.push(v);
                principal.push(-self.sign / self.r);
            }
        }
        for j in self.k + 1..=self.n {
            let mut v = vec![0.0; self.n + 1];
            v[j] = 1.0;
            directions.push(v);
            principal.push(0.0);
        }
        CurvaturePoint::from_principal(x, normal, principal, directions)
    }

    pub fn h(&self) -> f64 {
        self.sign * self.k as f64 / self.r
    }

    pub fn a_norm2(&self) -> f64 {
        self.k as f64 / (self.r * self.r)
    }

    pub fn a_op2(&self) -> f64 {
        if self.k > 0 {
            1.0 / (self.r * self.r)
        } else {
            0.0
        }
    }

    pub fn support(&self) -> f64 {
        self.sign * self.r
    }

    /// The constant `lambda` with `H = <x, N> + lambda`.
    pub fn lambda(&self) -> f64 {
        self.h() - self.support()
    }

    /// Gaussian surface area `|S^k| r^k (2 pi)^{-(k+1)/2} e^{-r^2/2}`.
    pub fn perimeter(&self) -> f64 {
        let k = self.k as f64;
        sphere_area(self.k) * self.r.powf(k) * (2.0 * PI).powf(-0.5 * (k + 1.0)) * (-0.5 * self.r * self.r).exp()
    }
}

/// Regular tensor index structure, used for adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub shape: Vec<usize>,
    pub periodic: Vec<bool>,
    /// Axis holding the polar angle of an `S^2` factor; the next axis is its
    /// azimuth. Nodes of the first and last rings are linked across the pole.
    pub pole_axis: Option<usize>,
}

impl Tensor {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn unravel(&self, mut i: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for a in (0..self.shape.len()).rev() {
            idx[a] = i % self.shape[a];
            i /= self.shape[a];
        }
        idx
    }

    fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (i, s)| acc * s + i)
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let idx = self.unravel(i);
        let mut out = Vec::new();
        for a in 0..self.shape.len() {
            let m = self.shape[a];
            for step in [-1isize, 1] {
                let j = idx[a] as isize + step;
                let j = if self.periodic[a] {
                    j.rem_euclid(m as isize) as usize
                } else if j < 0 || j >= m as isize {
                    continue;
                } else {
                    j as usize
                };
                let mut nb = idx.clone();
                nb[a] = j;
                out.push(self.ravel(&nb));
            }
            if self.pole_axis == Some(a) && (idx[a] == 0 || idx[a] + 1 == m) {
                let mphi = self.shape[a + 1];
                let mut nb = idx.clone();
                nb[a + 1] = (idx[a + 1] + mphi / 2) % mphi;
                out.push(self.ravel(&nb));
            }
        }
        out.sort_unstable();
        out.dedup();
        out.retain(|&j| j != i);
        out
    }
}

/// Node connectivity and the one-dimensional chart used by the difference
/// operators.
#[derive(Debug, Clone)]
pub enum Layout {
    /// Closed curve; node `j` neighbours `j - 1` and `j + 1`.
    Cyclic {
        frame: CurveFrame,
    },
    /// Revolution surface: `profile_len` profile nodes times `ring` nodes on
    /// `S^{n-1}`, node index `i * ring + j`.
    Profile {
        frame: CurveFrame,
        rho: Vec<f64>,
        ring: usize,
        tensor: Tensor,
    },
    Tensor(Tensor),
}

impl Layout {
    pub fn neighbors(&self, i: usize, len: usize) -> Vec<usize> {
        match self {
            Layout::Cyclic { .. } => vec![(i + len - 1) % len, (i + 1) % len],
            Layout::Profile { tensor, .. } | Layout::Tensor(tensor) => tensor.neighbors(i),
        }
    }

    pub fn curve_frame(&self) -> Option<&CurveFrame> {
        match self {
            Layout::Cyclic { frame } | Layout::Profile { frame, .. } => Some(frame),
            Layout::Tensor(_) => None,
        }
    }
}

/// Nodes with curvature data and quadrature weights on one surface.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub surface_id: u64,
    /// Surface dimension `n`.
    pub dim: usize,
    pub points: Vec<CurvaturePoint>,
    /// Gaussian-weighted measure `gamma(x) dA` of each node.
    pub weight: Vec<f64>,
    /// Unweighted surface measure `dA` of each node.
    pub area: Vec<f64>,
    /// `antipode[i]` is the node at `-x_i`, for symmetric surfaces.
    pub antipode: Option<Vec<usize>>,
    pub layout: Layout,
    pub round: Option<RoundModel>,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim + 1
    }

    pub fn check_owner(&self, surface: &Surface) -> Result<()> {
        if self.surface_id != surface.id() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `int v gamma` for nodal values `v`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weight).map(|(v, w)| v * w).sum()
    }

    /// `int g(point) gamma`.
    pub fn integrate_with(&self, g: impl Fn(&CurvaturePoint) -> f64) -> f64 {
        self.points.iter().zip(&self.weight).map(|(p, w)| g(p) * w).sum()
    }

    /// Gaussian surface area `int 1 gamma`.
    pub fn perimeter(&self) -> f64 {
        self.weight.iter().sum()
    }

    /// Largest `|f(x) - f(-x)|` over antipodal pairs.
    pub fn symmetry_defect(&self, f: &[f64]) -> Option<f64> {
        let a = self.antipode.as_ref()?;
        Some(a.iter().enumerate().map(|(i, &j)| (f[i] - f[j]).abs()).fold(0.0, f64::max))
    }

    fn flip(&mut self) {
        for p in &mut self.points {
            *p = p.flipped();
        }
        if let Some(frame) = match &mut self.layout {
            Layout::Cyclic { frame } | Layout::Profile { frame, .. } => Some(frame),
            Layout::Tensor(_) => None,
        } {
            frame.normal.iter_mut().for_each(|v| *v = [-v[0], -v[1]]);
            frame.curvature.iter_mut().for_each(|k| *k = -*k);
        }
    }
}

/// Builds a grid of roughly `resolution` nodes (exactly `resolution` for
/// curves and circles; profile nodes for revolution surfaces).
pub fn quadrature_grid(surface: &Surface, resolution: usize) -> Result<QuadratureGrid> {
    if resolution < 8 {
        return Err(Error::ResolutionTooLow(resolution));
    }
    let mut g = match surface.spec() {
        SurfaceSpec::Sphere { .. } | SurfaceSpec::Cylinder { .. } | SurfaceSpec::Strip { .. } => {
            let mut m = surface.round_model().expect("round surface");
            m.sign = 1.0;
            round_grid(m, resolution)
        }
        SurfaceSpec::Ellipsoid { axes } => ellipsoid_grid(axes, resolution),
        SurfaceSpec::Curve { curve } => {
            let c = if curve.len() == resolution { curve.clone() } else { curve.resample(resolution)? };
            Ok(curve_grid(c.points(), c.is_symmetric(), None))
        }
        SurfaceSpec::Profile { profile, n } => profile_grid(profile, *n, resolution),
    }?;
    if let Some(a) = g.antipode.clone() {
        // equal weights on antipodal pairs, not merely equal up to rounding
        for (i, &j) in a.iter().enumerate() {
            if i < j {
                let w = 0.5 * (g.weight[i] + g.weight[j]);
                let da = 0.5 * (g.area[i] + g.area[j]);
                (g.weight[i], g.weight[j], g.area[i], g.area[j]) = (w, w, da, da);
            }
        }
    }
    if surface.is_complement() {
        g.flip();
        if let Some(m) = &mut g.round {
            m.sign = -1.0;
        }
    }
    g.surface_id = surface.id();
    Ok(g)
}

/// Unit-sphere nodes with area weights summing to `|S^k|`.
struct SphereNodes {
    pts: Vec<Vec<f64>>,
    w: Vec<f64>,
    antipode: Vec<usize>,
    tensor: Tensor,
}

fn unit_sphere_nodes(k: usize, res: usize) -> SphereNodes {
    match k {
        0 => SphereNodes {
            pts: vec![vec![1.0], vec![-1.0]],
            w: vec![1.0, 1.0],
            antipode: vec![1, 0],
            tensor: Tensor { shape: vec![2], periodic: vec![false], pole_axis: None },
        },
        1 => {
            let m = res + res % 2;
            let pts = (0..m)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / m as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect();
            SphereNodes {
                pts,
                w: vec![2.0 * PI / m as f64; m],
                antipode: (0..m).map(|j| (j + m / 2) % m).collect(),
                tensor: Tensor { shape: vec![m], periodic: vec![true], pole_axis: None },
            }
        }
        _ => {
            let mt = ((res as f64 / 2.0).powf(1.0 / k as f64).ceil() as usize).max(2);
            let mp = 2 * mt;
            // polar angle j carries the factor sin^(k-1-j); in u = cos(theta) that is
            // the Gegenbauer weight, exact on polynomial integrands
            let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..k - 1)
                .map(|j| {
                    let (u, w) = gauss_gegenbauer(mt, 0.5 * (k - 2 - j) as f64);
                    (u.iter().map(|u| u.acos()).collect(), w)
                })
                .collect();
            let mut shape = vec![mt; k - 1];
            shape.push(mp);
            let tensor = Tensor { shape, periodic: (0..k).map(|a| a == k - 1).collect(), pole_axis: (k == 2).then_some(0) };
            let total = tensor.len();
            let mut pts = Vec::with_capacity(total);
            let mut w = Vec::with_capacity(total);
            let mut antipode = Vec::with_capacity(total);
            for i in 0..total {
                let idx = tensor.unravel(i);
                let mut angles: Vec<f64> = idx[..k - 1].iter().enumerate().map(|(j, &a)| rules[j].0[a]).collect();
                angles.push(2.0 * PI * idx[k - 1] as f64 / mp as f64);
                let mut wi = 2.0 * PI / mp as f64;
                for (j, &a) in idx[..k - 1].iter().enumerate() {
                    wi *= rules[j].1[a];
                }
                pts.push(super::unit_sphere_point(k, &angles).expect("grid angles in range"));
                w.push(wi);
                let mut opp: Vec<usize> = idx[..k - 1].iter().map(|&a| mt - 1 - a).collect();
                opp.push((idx[k - 1] + mp / 2) % mp);
                antipode.push(tensor.ravel(&opp));
            }
            SphereNodes { pts, w, antipode, tensor }
        }
    }
}

fn round_grid(m: RoundModel, res: usize) -> Result<QuadratureGrid> {
    let d = m.n - m.k;
    let (sphere_res, mh) = if d == 0 {
        (res, 0)
    } else if m.k == 0 {
        (2, ((res as f64 / 2.0).powf(1.0 / d as f64).ceil() as usize).clamp(4, 64))
    } else {
        let mh = ((res as f64).powf(1.0 / (d + 1) as f64).ceil() as usize).clamp(4, 32);
        ((res / mh.pow(d as u32)).max(8), mh)
    };
    let sph = unit_sphere_nodes(m.k, sphere_res);
    let (hx, hw) = if d > 0 { gauss_hermite(mh) } else { (vec![], vec![]) };
    let mut shape = sph.tensor.shape.clone();
    let mut periodic = sph.tensor.periodic.clone();
    shape.extend(std::iter::repeat_n(mh, d));
    periodic.extend(std::iter::repeat_n(false, d));
    let tensor = Tensor { shape, periodic, pole_axis: sph.tensor.pole_axis };
    let total = tensor.len();
    let radial = m.r.powi(m.k as i32) * (2.0 * PI).powf(-0.5 * (m.k as f64 + 1.0)) * (-0.5 * m.r * m.r).exp();
    let ns = sph.pts.len();
    let mut points = Vec::with_capacity(total);
    let mut weight = Vec::with_capacity(total);
    let mut area = Vec::with_capacity(total);
    let mut antipode = Vec::with_capacity(total);
    for i in 0..total {
        let (is, rest) = (i / mh.pow(d as u32).max(1), i % mh.pow(d as u32).max(1));
        let mut x: Vec<f64> = sph.pts[is].iter().map(|u| m.r * u).collect();
        let mut w = sph.w[is] * radial;
        let mut opp_flat = 0;
        let mut rem = rest;
        let mut flat = vec![0.0; d];
        for a in (0..d).rev() {
            let j = rem % mh;
            rem /= mh;
            flat[a] = hx[j];
            w *= hw[j];
            opp_flat += (mh - 1 - j) * mh.pow((d - 1 - a) as u32);
        }
        x.extend(flat);
        area.push(w / gaussian_density(&x));
        weight.push(w);
        antipode.push(sph.antipode[is] * mh.pow(d as u32).max(1) + opp_flat);
        points.push(m.point(x));
    }
    debug_assert_eq!(ns * mh.pow(d as u32).max(1), total);
    let layout = if m.n == 1 && m.k == 1 {
        let pts: Vec<[f64; 2]> = points.iter().map(|p| [p.x[0], p.x[1]]).collect();
        Layout::Cyclic { frame: CurveFrame::compute(&pts, 2.0 * PI / pts.len() as f64, FdOrder::default()) }
    } else {
        Layout::Tensor(tensor)
    };
    Ok(QuadratureGrid { surface_id: 0, dim: m.n, points, weight, area, antipode: Some(antipode), layout, round: Some(m) })
}

fn ellipsoid_grid(axes: &[f64], res: usize) -> Result<QuadratureGrid> {
    let k = axes.len() - 1;
    let sph = unit_sphere_nodes(k, res);
    let det: f64 = axes.iter().product();
    let mut points = Vec::with_capacity(sph.pts.len());
    let mut weight = Vec::with_capacity(sph.pts.len());
    let mut area = Vec::with_capacity(sph.pts.len());
    for (u, w) in sph.pts.iter().zip(&sph.w) {
        let p = ellipsoid_point(axes, u);
        let stretch = u.iter().zip(axes).map(|(v, a)| (v / a) * (v / a)).sum::<f64>().sqrt();
        let da = det * stretch * w;
        area.push(da);
        weight.push(da * gaussian_density(&p.x));
        points.push(p);
    }
    let layout = if k == 1 {
        let pts: Vec<[f64; 2]> = points.iter().map(|p| [p.x[0], p.x[1]]).collect();
        Layout::Cyclic { frame: CurveFrame::compute(&pts, 2.0 * PI / pts.len() as f64, FdOrder::default()) }
    } else {
        Layout::Tensor(sph.tensor)
    };
    Ok(QuadratureGrid { surface_id: 0, dim: k, points, weight, area, antipode: Some(sph.antipode), layout, round: None })
}

/// Grid on a sampled closed curve with finite-difference curvature.
pub(crate) fn curve_grid(pts: &[[f64; 2]], symmetric: bool, order: Option<FdOrder>) -> QuadratureGrid {
    let m = pts.len();
    let frame = CurveFrame::compute(pts, 2.0 * PI / m as f64, order.unwrap_or_default());
    let ds = frame.ds();
    let mut points = Vec::with_capacity(m);
    let mut weight = Vec::with_capacity(m);
    for j in 0..m {
        let x = pts[j].to_vec();
        weight.push(ds[j] * gaussian_density(&x));
        points.push(CurvaturePoint::from_principal(x, frame.normal[j].to_vec(), vec![-frame.curvature[j]], vec![frame.tangent[j].to_vec()]));
    }
    let antipode = (symmetric && m.is_multiple_of(2)).then(|| (0..m).map(|j| (j + m / 2) % m).collect());
    QuadratureGrid { surface_id: 0, dim: 1, points, weight, area: ds, antipode, layout: Layout::Cyclic { frame }, round: None }
}

fn profile_grid(prof: &super::RevolutionProfile, n: usize, res: usize) -> Result<QuadratureGrid> {
    let curve = if prof.curve().len() == res { prof.curve().clone() } else { prof.curve().resample(res)? };
    let prof = super::RevolutionProfile::new(curve)?;
    let pts = prof.curve().points();
    let mp = pts.len();
    let frame = CurveFrame::compute(pts, 2.0 * PI / mp as f64, FdOrder::default());
    let ring = unit_sphere_nodes(n - 1, if n == 2 { 16 } else { 32 });
    let nr = ring.pts.len();
    let ds = frame.ds();
    let mut points = Vec::with_capacity(mp * nr);
    let mut weight = Vec::with_capacity(mp * nr);
    let mut area = Vec::with_capacity(mp * nr);
    for i in 0..mp {
        for (omega, wr) in ring.pts.iter().zip(&ring.w) {
            let p = profile::revolution_point(pts[i], frame.tangent[i], frame.normal[i], frame.curvature[i], omega);
            let da = ds[i] * wr * pts[i][0].powi(n as i32 - 1);
            area.push(da);
            weight.push(da * gaussian_density(&p.x));
            points.push(p);
        }
    }
    let antipode = prof.reflection().map(|refl| (0..mp * nr).map(|idx| refl[idx / nr] * nr + ring.antipode[idx % nr]).collect());
    let mut shape = vec![mp];
    shape.extend(&ring.tensor.shape);
    let mut periodic = vec![true];
    periodic.extend(&ring.tensor.periodic);
    let tensor = Tensor { shape, periodic, pole_axis: ring.tensor.pole_axis.map(|a| a + 1) };
    let rho = pts.iter().map(|p| p[0]).collect();
    Ok(QuadratureGrid { surface_id: 0, dim: n, points, weight, area, antipode, layout: Layout::Profile { frame, rho, ring: nr, tensor }, round: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_surface, PlanarCurve, RevolutionProfile};

    fn grid(spec: SurfaceSpec, res: usize) -> QuadratureGrid {
        make_surface(spec).unwrap().grid(res).unwrap()
    }

    #[test]
    fn sphere_weights_reproduce_closed_form_perimeter() {
        for n in 1..=4 {
            let r = 1.3;
            let g = grid(SurfaceSpec::Sphere { r, n }, 2048);
            let exact = RoundModel { r, k: n, n, sign: 1.0 }.perimeter();
            assert!((g.perimeter() / exact - 1.0).abs() < 1e-8, "n={n}");
        }
    }

    #[test]
    fn unit_sphere_area_sums_correctly() {
        for k in 0..=5 {
            let s = unit_sphere_nodes(k, 400);
            let total: f64 = s.w.iter().sum();
            assert!((total / sphere_area(k) - 1.0).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn cylinder_and_strip_weights() {
        let g = grid(SurfaceSpec::Cylinder { r: 0.9, k: 1, n: 3 }, 2048);
        let exact = RoundModel { r: 0.9, k: 1, n: 3, sign: 1.0 }.perimeter();
        assert!((g.perimeter() / exact - 1.0).abs() < 1e-12);
        let s = grid(SurfaceSpec::Strip { t: 1.0, n: 1 }, 64);
        let c = grid(SurfaceSpec::Cylinder { r: 1.0, k: 0, n: 1 }, 64);
        assert!((s.perimeter() - c.perimeter()).abs() < 1e-15);
        assert!((s.perimeter() - 2.0 * (-0.5f64).exp() / (2.0 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn grids_are_closed_under_antipodes() {
        let specs = vec![
            SurfaceSpec::Sphere { r: 1.0, n: 2 },
            SurfaceSpec::Cylinder { r: 1.0, k: 1, n: 2 },
            SurfaceSpec::Ellipsoid { axes: vec![2.0, 1.0, 1.0] },
            SurfaceSpec::Curve { curve: PlanarCurve::polar_wave(1.0, 0.3, 6, 128).unwrap() },
            SurfaceSpec::Profile { profile: RevolutionProfile::circle(3.0, 1.0, 64).unwrap(), n: 2 },
        ];
        for spec in specs {
            let g = grid(spec, 64);
            let a = g.antipode.as_ref().unwrap();
            for (i, &j) in a.iter().enumerate() {
                let (p, q) = (&g.points[i], &g.points[j]);
                assert!(p.x.iter().zip(&q.x).all(|(u, v)| (u + v).abs() < 1e-12));
                assert_eq!(g.weight[i], g.weight[j]);
            }
        }
    }

    #[test]
    fn resolution_guard() {
        let s = make_surface(SurfaceSpec::Sphere { r: 1.0, n: 2 }).unwrap();
        assert_eq!(s.grid(4).unwrap_err(), Error::ResolutionTooLow(4));
    }

    #[test]
    fn ellipse_perimeter_converges_spectrally() {
        // unweighted length of the (2,1) ellipse
        let g = grid(SurfaceSpec::Ellipsoid { axes: vec![2.0, 1.0] }, 128);
        let len: f64 = g.area.iter().sum();
        assert!((len - 9.688448220547675).abs() < 1e-12);
    }

    #[test]
    fn torus_area() {
        // surface area of a torus of radii 3 and 1 in R^3 is 4 pi^2 R a
        let g = grid(SurfaceSpec::Profile { profile: RevolutionProfile::circle(3.0, 1.0, 64).unwrap(), n: 2 }, 256);
        let total: f64 = g.area.iter().sum();
        assert!((total - 12.0 * PI * PI).abs() < 1e-5, "{total}");
    }

    #[test]
    fn tensor_neighbors() {
        let t = Tensor { shape: vec![3, 4], periodic: vec![false, true], pole_axis: None };
        assert_eq!(t.neighbors(0), vec![1, 3, 4]);
        assert_eq!(t.neighbors(5), vec![1, 4, 6, 9]);
    }
}
