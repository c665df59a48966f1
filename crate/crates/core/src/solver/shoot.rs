//! Planar lambda-curves `kappa = <x, N> + lambda` by shooting the unit-speed
//! system `x' = cos theta, y' = sin theta, theta' = kappa`, with `N` the
//! right-hand normal `(sin theta, -cos theta)`.

use super::ode::{integrate, OdeOptions, Solution};
use crate::error::{Error, Result};
use crate::geometry::PlanarCurve;
use crate::roots::{find_root, RootOptions};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootState {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub kappa: f64,
}

impl ShootState {
    fn from_state(s: f64, y: &[f64], lambda: f64) -> Self {
        Self { s, x: y[0], y: y[1], theta: y[2], kappa: curvature(y, lambda) }
    }
}

fn curvature(y: &[f64], lambda: f64) -> f64 {
    y[0] * y[2].sin() - y[1] * y[2].cos() + lambda
}

/// An integrated arc with dense output.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub lambda: f64,
    pub solution: Solution,
    pub start: ShootState,
    pub end: ShootState,
}

impl Arc {
    pub fn state(&self, s: f64) -> ShootState {
        ShootState::from_state(s, &self.solution.eval(s), self.lambda)
    }

    /// `n` states at equal arclength spacing, both ends included.
    pub fn sample(&self, n: usize) -> Vec<ShootState> {
        let len = self.solution.t_end - self.solution.t_start;
        (0..n).map(|j| self.state(self.solution.t_start + len * j as f64 / (n - 1).max(1) as f64)).collect()
    }

    /// Distance between the end point and the start point.
    pub fn position_gap(&self) -> f64 {
        (self.end.x - self.start.x).hypot(self.end.y - self.start.y)
    }

    /// Distance of the end tangent angle from the start angle modulo `2 pi`.
    pub fn angle_gap(&self) -> f64 {
        let d = (self.end.theta - self.start.theta).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d)
    }

    /// Combined closure defect of position and tangent.
    pub fn closure_residual(&self) -> f64 {
        self.position_gap() + self.angle_gap()
    }
}

/// Shoots from `(x0, y0)` with tangent angle `theta0` over arclength `length`.
pub fn shoot_curve(lambda: f64, start: [f64; 2], theta0: f64, length: f64, opts: OdeOptions) -> Result<Arc> {
    if !(length > 0.0) {
        return Err(Error::InvalidParameter(format!("arc length {length} must be positive")));
    }
    let y0 = [start[0], start[1], theta0];
    let solution = integrate(
        |_, y, d| {
            let (s, c) = y[2].sin_cos();
            d[0] = c;
            d[1] = s;
            d[2] = y[0] * s - y[1] * c + lambda;
        },
        0.0,
        &y0,
        length,
        opts,
    )?;
    let start = ShootState::from_state(0.0, &y0, lambda);
    let end = ShootState::from_state(length, &solution.y_end, lambda);
    Ok(Arc { lambda, solution, start, end })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedCurveOptions {
    /// Distance of the starting vertex from the origin.
    pub start_radius: f64,
    /// Sub-intervals scanned for sign changes of the closure defect.
    pub scan: usize,
    pub ode: OdeOptionsSer,
    /// Node count of the assembled curve, rounded up to a multiple of `2m`.
    pub nodes: usize,
}

/// Serializable copy of the integrator tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeOptionsSer {
    pub rtol: f64,
    pub atol: f64,
}

impl From<OdeOptionsSer> for OdeOptions {
    fn from(o: OdeOptionsSer) -> Self {
        OdeOptions { rtol: o.rtol, atol: o.atol, ..Default::default() }
    }
}

impl Default for ClosedCurveOptions {
    fn default() -> Self {
        Self { start_radius: 3.0, scan: 64, ode: OdeOptionsSer { rtol: 1e-14, atol: 1e-15 }, nodes: 2048 }
    }
}

/// A closed `m`-fold symmetric lambda-curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    pub lambda: f64,
    pub m: usize,
    pub curve: PlanarCurve,
    /// Gap after shooting the whole curve in one pass.
    pub closure_residual: f64,
    pub min_curvature: f64,
    pub max_curvature: f64,
    pub length: f64,
    /// Every non-circular closure root located in the bracket, ascending.
    pub roots: Vec<f64>,
}

/// Shoots from the vertex `(rho0, 0)` perpendicular to the axis until the
/// ray at angle `pi/m`; returns the tangent defect there and the arc.
fn half_period(lambda: f64, m: usize, rho0: f64, opts: OdeOptions) -> Result<Option<(f64, Arc)>> {
    let alpha = PI / m as f64;
    // long enough to reach the ray for any curve of bounded turning
    let length = 4.0 * PI * (rho0 + 1.0);
    let arc = shoot_curve(lambda, [rho0, 0.0], PI / 2.0, length, opts)?;
    let (sa, ca) = alpha.sin_cos();
    let Some(s_hit) = arc.solution.first_root(|y| y[1] * ca - y[0] * sa) else { return Ok(None) };
    let y = arc.solution.eval(s_hit);
    if y[0] * ca + y[1] * sa <= 0.0 {
        return Ok(None);
    }
    // perpendicular crossing: tangent angle alpha + pi/2
    let defect = y[2] - (alpha + PI / 2.0);
    let trimmed = shoot_curve(lambda, [rho0, 0.0], PI / 2.0, s_hit, opts)?;
    Ok(Some((defect, trimmed)))
}

/// Evaluates `f` on every input, spreading contiguous chunks over threads.
fn parallel_map<T: Send>(xs: &[f64], f: impl Fn(f64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(xs.len().max(1));
    let chunk = xs.len().div_ceil(threads).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = xs.chunks(chunk).map(|c| scope.spawn(|| c.iter().map(|&x| f(x)).collect::<Result<Vec<T>>>())).collect();
        let mut out = Vec::with_capacity(xs.len());
        for h in handles {
            out.extend(h.join().expect("sweep worker panicked")?);
        }
        Ok(out)
    })
}

fn reflect(p: [f64; 2], alpha: f64) -> [f64; 2] {
    let (s, c) = (2.0 * alpha).sin_cos();
    [c * p[0] + s * p[1], s * p[0] - c * p[1]]
}

fn rotate(p: [f64; 2], a: f64) -> [f64; 2] {
    let (s, c) = a.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

/// Locates `lambda` in `bracket` for which the curve shot from the vertex
/// `(rho0, 0)` closes with `m`-fold symmetry, and assembles it. Circles
/// close for every `m` and are skipped; among several roots the curve with
/// the largest ratio of minimal to maximal curvature is returned.
pub fn find_closed_curve(bracket: (f64, f64), m: usize, opts: ClosedCurveOptions) -> Result<ClosedCurve> {
    let (a, b) = bracket;
    if m < 3 {
        return Err(Error::InvalidParameter(format!("fold symmetry m = {m} must be at least 3")));
    }
    if !(a < b && b < 0.0) {
        return Err(Error::InvalidParameter(format!("lambda bracket [{a}, {b}] must lie in lambda < 0")));
    }
    let ode: OdeOptions = opts.ode.into();
    let rho0 = opts.start_radius;
    let defect = |l: f64| half_period(l, m, rho0, ode).map(|o| o.map(|(d, _)| d));
    let grid: Vec<f64> = (0..=opts.scan).map(|j| a + (b - a) * j as f64 / opts.scan as f64).collect();
    let vals = parallel_map(&grid, defect)?;
    let mut candidates = Vec::new();
    for j in 0..opts.scan {
        if let (Some(u), Some(v)) = (vals[j], vals[j + 1]) {
            if u.signum() != v.signum() {
                let r = find_root(
                    |l| defect(l).ok().flatten().unwrap_or(f64::NAN),
                    grid[j],
                    grid[j + 1],
                    RootOptions { xtol: 1e-14, ftol: 1e-14, ..Default::default() },
                );
                // a jump in the crossing point also changes sign; keep true zeros only
                if let Ok(r) = r {
                    if defect(r)?.is_some_and(|d| d.abs() < 1e-8) {
                        candidates.push(r);
                    }
                }
            }
        }
    }
    let mut roots = Vec::new();
    let mut curves = Vec::new();
    let mut first_err = None;
    for &lambda in &candidates {
        match assemble(lambda, m, rho0, ode, opts.nodes) {
            Ok(c) if c.max_curvature - c.min_curvature <= 1e-8 * c.max_curvature.abs() => {}
            Ok(c) => {
                roots.push(lambda);
                curves.push(c);
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    // the roundest curve is the best conditioned for downstream quadrature
    let best = curves.into_iter().max_by(|p, q| (p.min_curvature / p.max_curvature).total_cmp(&(q.min_curvature / q.max_curvature)));
    match best {
        Some(mut c) => {
            c.roots = roots;
            Ok(c)
        }
        None => Err(first_err.unwrap_or(Error::NoRootInBracket(a, b))),
    }
}

fn assemble(lambda: f64, m: usize, rho0: f64, ode: OdeOptions, nodes: usize) -> Result<ClosedCurve> {
    let (_, arc) = half_period(lambda, m, rho0, ode)?.ok_or(Error::NoRootInBracket(lambda, lambda))?;
    let half = arc.solution.t_end;
    let alpha = PI / m as f64;
    let per = nodes.div_ceil(2 * m).max(4);
    let total = 2 * m * per;
    let ds = 2.0 * half / (2 * per) as f64;
    let mut pts = Vec::with_capacity(total);
    let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..total {
        let s = j as f64 * ds;
        let period = (s / (2.0 * half)).floor();
        let local = s - period * 2.0 * half;
        let p = if local <= half {
            let st = arc.state(local);
            kmin = kmin.min(st.kappa);
            kmax = kmax.max(st.kappa);
            [st.x, st.y]
        } else {
            let st = arc.state(2.0 * half - local);
            reflect([st.x, st.y], alpha)
        };
        pts.push(rotate(p, 2.0 * alpha * period));
    }
    let full = shoot_curve(lambda, [rho0, 0.0], PI / 2.0, 2.0 * half * m as f64, ode)?;
    let closure_residual = full.position_gap() + (full.end.theta - full.start.theta - 2.0 * PI).abs();
    if kmin <= 0.0 {
        return Err(Error::NonConvexSolution(kmin));
    }
    let curve = PlanarCurve::from_periodic_samples(pts, m.is_multiple_of(2))?;
    Ok(ClosedCurve { lambda, m, curve, closure_residual, min_curvature: kmin, max_curvature: kmax, length: 2.0 * half * m as f64, roots: vec![] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> OdeOptions {
        OdeOptions { rtol: 1e-12, atol: 1e-13, ..Default::default() }
    }

    #[test]
    fn unit_circle_closes() {
        let arc = shoot_curve(0.0, [1.0, 0.0], PI / 2.0, 2.0 * PI, tight()).unwrap();
        assert!(arc.closure_residual() < 1e-8, "{}", arc.closure_residual());
        for st in arc.sample(17) {
            assert!((st.x.hypot(st.y) - 1.0).abs() < 1e-9);
            assert!((st.kappa - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn circles_of_any_radius_close() {
        for r in [0.5, 2.0, 3.0] {
            let arc = shoot_curve(1.0 / r - r, [r, 0.0], PI / 2.0, 2.0 * PI * r, tight()).unwrap();
            assert!(arc.closure_residual() < 1e-8);
        }
    }

    #[test]
    fn generic_start_does_not_close() {
        let arc = shoot_curve(-1.0, [1.5, 0.0], PI / 2.0, 2.0 * PI, tight()).unwrap();
        assert!(arc.closure_residual() > 1e-3);
    }

    #[test]
    fn three_fold_curve() {
        let c = find_closed_curve((-3.0, -0.1), 3, ClosedCurveOptions { nodes: 512, ..Default::default() }).unwrap();
        assert!(c.lambda < 0.0);
        assert!(c.closure_residual < 1e-8, "{}", c.closure_residual);
        assert!(c.min_curvature > 0.0);
        // rotation by 2 pi / 3 permutes the nodes
        let pts = c.curve.points();
        let shift = pts.len() / 3;
        for j in 0..pts.len() {
            let q = rotate(pts[j], 2.0 * PI / 3.0);
            let r = pts[(j + shift) % pts.len()];
            assert!((q[0] - r[0]).hypot(q[1] - r[1]) < 1e-8);
        }
    }

    #[test]
    fn three_fold_curve_is_a_lambda_curve() {
        use crate::geometry::{make_surface, SurfaceSpec};
        let c = find_closed_curve((-3.0, -0.1), 3, ClosedCurveOptions::default()).unwrap();
        assert!(c.roots.contains(&c.lambda));
        let s = make_surface(SurfaceSpec::Curve { curve: c.curve.clone() }).unwrap();
        let g = s.grid(c.curve.len()).unwrap();
        let r = s.lambda_residual(c.lambda, &g).unwrap();
        assert!(r.max < 1e-6, "{r:?}");
    }

    #[test]
    fn narrow_bracket_has_no_root() {
        let r = find_closed_curve((-0.2, -0.1), 3, ClosedCurveOptions { scan: 4, nodes: 64, ..Default::default() });
        assert!(matches!(r, Err(Error::NoRootInBracket(_, _))), "{r:?}");
    }
}
