//! Volume-constrained gradient flow of Gaussian perimeter for symmetric
//! curves and revolution profiles.
//!
//! Each step moves the profile nodes with normal speed
//! `f = -(H - <x,N> - lambda_hat)`, where `lambda_hat` is the weighted mean of
//! `H - <x,N>` so that the volume variation vanishes. The second difference
//! along the profile is taken implicitly as a stabilizer; all geometric
//! quantities come from the fourth-order quadrature grid, so stationary
//! points of the discrete flow are discrete lambda-surfaces.

use crate::error::{Error, Result};
use crate::geometry::profile::first_crossing;
use crate::geometry::{make_surface, PlanarCurve, QuadratureGrid, RevolutionProfile, Surface, SurfaceSpec};
use crate::linalg::solve_cyclic_tridiagonal;
use crate::measure::volume_on_grid;
use crate::roots::{find_root, RootOptions};
use serde::Serialize;

/// The evolving boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowShape {
    /// A centrally symmetric closed curve in `R^2`.
    Curve(PlanarCurve),
    /// A profile symmetric under `z -> -z`, rotated in `R^(n+1)`.
    Profile { profile: RevolutionProfile, n: usize },
}

impl FlowShape {
    pub fn points(&self) -> &[[f64; 2]] {
        match self {
            FlowShape::Curve(c) => c.points(),
            FlowShape::Profile { profile, .. } => profile.curve().points(),
        }
    }

    pub fn spec(&self) -> SurfaceSpec {
        match self {
            FlowShape::Curve(c) => SurfaceSpec::Curve { curve: c.clone() },
            FlowShape::Profile { profile, n } => SurfaceSpec::Profile { profile: profile.clone(), n: *n },
        }
    }

    pub fn surface(&self) -> Result<Surface> {
        make_surface(self.spec())
    }

    fn with_points(&self, pts: Vec<[f64; 2]>) -> Result<Self> {
        if let Some((i, j)) = first_crossing(&pts) {
            return Err(Error::SelfIntersection(format!("segments {i} and {j} cross")));
        }
        Ok(match self {
            FlowShape::Curve(_) => FlowShape::Curve(PlanarCurve::from_periodic_samples(pts, true)?),
            FlowShape::Profile { n, .. } => FlowShape::Profile { profile: RevolutionProfile::new(PlanarCurve::from_periodic_samples(pts, false)?)?, n: *n },
        })
    }

    fn curve(&self) -> &PlanarCurve {
        match self {
            FlowShape::Curve(c) => c,
            FlowShape::Profile { profile, .. } => profile.curve(),
        }
    }

    /// Node pairing realising `x -> -x`: antipodes on a curve, the mirror
    /// `(rho, z) -> (rho, -z)` on a profile.
    fn symmetry_map(&self) -> Option<Vec<usize>> {
        match self {
            FlowShape::Curve(c) => {
                let m = c.len();
                (m % 2 == 0 && c.is_symmetric()).then(|| (0..m).map(|i| (i + m / 2) % m).collect())
            }
            FlowShape::Profile { profile, .. } => profile.reflection(),
        }
    }

    fn symmetrize(&self, pts: &mut [[f64; 2]], map: &[usize]) {
        let src = pts.to_vec();
        let mirror = match self {
            FlowShape::Curve(_) => |p: [f64; 2]| [-p[0], -p[1]],
            FlowShape::Profile { .. } => |p: [f64; 2]| [p[0], -p[1]],
        };
        for (i, &j) in map.iter().enumerate() {
            let q = mirror(src[j]);
            pts[i] = [0.5 * (src[i][0] + q[0]), 0.5 * (src[i][1] + q[1])];
        }
    }

    /// Uniform-arclength resampling that keeps node 0 in place.
    fn resampled(&self) -> Result<Self> {
        let c = self.curve().reparametrize_by_arclength(self.points().len())?;
        self.with_points(c.points().to_vec())
    }
}

/// Per-profile-node data of one configuration.
struct Snapshot {
    grid: QuadratureGrid,
    /// `H - <x,N>` at each profile node.
    g: Vec<f64>,
    /// Gaussian weight aggregated over the rotation orbit.
    w: Vec<f64>,
    normal: Vec<[f64; 2]>,
}

fn snapshot(shape: &FlowShape) -> Result<Snapshot> {
    let m = shape.points().len();
    let grid = shape.surface()?.grid(m)?;
    let frame = grid.layout.curve_frame().ok_or_else(|| Error::UnsupportedSurface("flow needs a profile layout".into()))?.clone();
    let ring = grid.points.len() / m;
    let g = (0..m).map(|i| grid.points[i * ring].h - grid.points[i * ring].support()).collect();
    let w = (0..m).map(|i| grid.weight[i * ring..(i + 1) * ring].iter().sum()).collect();
    Ok(Snapshot { g, w, normal: frame.normal.clone(), grid })
}

/// Configuration along the flow with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub shape: FlowShape,
    pub volume: f64,
    pub perimeter: f64,
    pub lambda_hat: f64,
    pub iteration: usize,
    /// Weighted standard deviation of `H - <x,N>`.
    pub defect: f64,
}

impl FlowState {
    pub fn new(shape: FlowShape) -> Result<Self> {
        let snap = snapshot(&shape)?;
        Self::from_snapshot(shape, &snap, 0)
    }

    fn from_snapshot(shape: FlowShape, snap: &Snapshot, iteration: usize) -> Result<Self> {
        let total: f64 = snap.w.iter().sum();
        let lambda_hat = snap.g.iter().zip(&snap.w).map(|(g, w)| g * w).sum::<f64>() / total;
        let var = snap.g.iter().zip(&snap.w).map(|(g, w)| w * (g - lambda_hat).powi(2)).sum::<f64>() / total;
        Ok(Self { volume: volume_on_grid(&snap.grid)?, perimeter: snap.grid.perimeter(), lambda_hat, iteration, defect: var.sqrt(), shape })
    }

    pub fn csv_row(&self) -> [f64; 5] {
        [self.iteration as f64, self.perimeter, self.volume, self.lambda_hat, self.defect]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowOptions {
    /// Stop once the stationarity defect falls below this.
    pub tol: f64,
    /// Largest time step; halved on perimeter increase and regrown on success.
    pub step: f64,
    pub min_step: f64,
    /// Budget of attempted steps, accepted or not.
    pub max_steps: usize,
    pub resample_every: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { tol: 1e-6, step: 0.05, min_step: 1e-12, max_steps: 20_000, resample_every: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowStatus {
    Converged,
    /// The attempt budget ran out; the state is the last accepted one.
    StepLimitExceeded,
    /// The step shrank below `min_step` without decreasing the perimeter.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub state: FlowState,
    pub status: FlowStatus,
    /// One entry per accepted state, the projected start first.
    pub trajectory: Vec<[f64; 5]>,
    pub attempts: usize,
}

pub const TRAJECTORY_HEADER: [&str; 5] = ["step", "perimeter", "volume", "lambda_hat", "defect"];

impl FlowResult {
    /// Turns a non-converged outcome into an error.
    pub fn converged(&self) -> Result<&FlowState> {
        match self.status {
            FlowStatus::Converged => Ok(&self.state),
            _ => Err(Error::StepLimitExceeded(self.attempts)),
        }
    }
}

fn shift(shape: &FlowShape, normal: &[[f64; 2]], delta: f64) -> Vec<[f64; 2]> {
    shape.points().iter().zip(normal).map(|(p, v)| [p[0] + delta * v[0], p[1] + delta * v[1]]).collect()
}

/// Moves the shape along its normal until the enclosed Gaussian volume is `c`.
fn project_volume(shape: FlowShape, c: f64) -> Result<(FlowShape, Snapshot)> {
    let snap = snapshot(&shape)?;
    let v0 = volume_on_grid(&snap.grid)?;
    if (v0 - c).abs() <= 1e-13 {
        return Ok((shape, snap));
    }
    let mut failure = None;
    let mut vol = |d: f64| -> f64 {
        let r = shape.with_points(shift(&shape, &snap.normal, d)).and_then(|s| s.surface()).and_then(|s| {
            let g = s.grid(shape.points().len())?;
            volume_on_grid(&g)
        });
        match r {
            Ok(v) => v - c,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let scale = shape.curve().diameter();
    let mut span = 1e-3 * scale;
    let dir = if v0 < c { 1.0 } else { -1.0 };
    let mut hi = dir * span;
    while vol(hi).signum() == (v0 - c).signum() {
        span *= 2.0;
        if span > 0.25 * scale {
            return Err(failure.unwrap_or(Error::NoBracket(0.0, hi)));
        }
        hi = dir * span;
    }
    let delta = find_root(&mut vol, 0.0, hi, RootOptions { xtol: 1e-16, ftol: 1e-14, ..Default::default() });
    let delta = match (delta, failure) {
        (Ok(d), _) => d,
        (Err(_), Some(e)) | (Err(e), None) => return Err(e),
    };
    let moved = shape.with_points(shift(&shape, &snap.normal, delta))?;
    let snap = snapshot(&moved)?;
    Ok((moved, snap))
}

fn validate(shape: &FlowShape, c: f64) -> Result<Vec<usize>> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter(format!("target volume must lie in (0,1), got {c}")));
    }
    let map = shape.symmetry_map().ok_or_else(|| Error::Precondition("flow needs a symmetric initial shape".into()))?;
    let v = volume_on_grid(&snapshot(shape)?.grid)?;
    if (v - c).abs() > 0.1 * c {
        return Err(Error::Precondition(format!("initial volume {v} is not within 10% of {c}")));
    }
    Ok(map)
}

/// One semi-implicit step of size `tau` followed by symmetrization,
/// optional resampling and volume projection.
fn advance(shape: &FlowShape, snap: &Snapshot, lambda_hat: f64, tau: f64, map: &[usize], resample: bool, c: f64) -> Result<(FlowShape, Snapshot)> {
    let m = snap.g.len();
    let pts0 = shape.points();
    let chord: Vec<f64> = (0..m)
        .map(|i| {
            let (p, q) = (pts0[i], pts0[(i + 1) % m]);
            (q[0] - p[0]).hypot(q[1] - p[1])
        })
        .collect();
    // second arclength difference on the local chords, taken implicitly
    let (mut lower, mut diag, mut upper) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    for i in 0..m {
        let (dm, dp) = (chord[(i + m - 1) % m], chord[i]);
        let c = 2.0 * tau / (dm + dp);
        lower[i] = -c / dm;
        upper[i] = -c / dp;
        diag[i] = 1.0 + c / dm + c / dp;
    }
    let f: Vec<f64> = snap.g.iter().map(|g| -(g - lambda_hat)).collect();
    let mut pts = shape.points().to_vec();
    for axis in 0..2 {
        let rhs: Vec<f64> = (0..m).map(|i| tau * f[i] * snap.normal[i][axis]).collect();
        let d = solve_cyclic_tridiagonal(&lower, &diag, &upper, &rhs)?;
        pts.iter_mut().zip(d).for_each(|(p, v)| p[axis] += v);
    }
    shape.symmetrize(&mut pts, map);
    let mut next = shape.with_points(pts)?;
    if resample {
        next = next.resampled()?;
        let mut pts = next.points().to_vec();
        next.symmetrize(&mut pts, map);
        next = next.with_points(pts)?;
    }
    project_volume(next, c)
}

/// Flows `initial` toward a constrained critical point of Gaussian perimeter
/// at Gaussian volume `c`.
pub fn mcf_minimize(initial: FlowShape, c: f64, opts: FlowOptions) -> Result<FlowResult> {
    if !(opts.tol > 0.0 && opts.step > 0.0 && opts.min_step > 0.0) {
        return Err(Error::InvalidParameter("flow tolerances and steps must be positive".into()));
    }
    let map = validate(&initial, c)?;
    let initial = initial.resampled()?;
    let mut map = initial.symmetry_map().unwrap_or(map);
    let mut pts = initial.points().to_vec();
    initial.symmetrize(&mut pts, &map);
    let (shape, mut snap) = project_volume(initial.with_points(pts)?, c)?;
    let mut state = FlowState::from_snapshot(shape, &snap, 0)?;
    let mut trajectory = vec![state.csv_row()];
    let mut tau = opts.step;
    let mut attempts = 0;
    let mut since_resample = 0;
    let status = loop {
        if state.defect < opts.tol {
            break FlowStatus::Converged;
        }
        if attempts >= opts.max_steps {
            break FlowStatus::StepLimitExceeded;
        }
        if tau < opts.min_step {
            break FlowStatus::Stalled;
        }
        attempts += 1;
        let due = opts.resample_every > 0 && since_resample + 1 >= opts.resample_every;
        let mut trial = advance(&state.shape, &snap, state.lambda_hat, tau, &map, due, c);
        let mut resampled = due;
        if due && trial.as_ref().map_or(true, |(_, s)| s.grid.perimeter() > state.perimeter) {
            // resampling can cost truncation error; retry the plain step
            trial = advance(&state.shape, &snap, state.lambda_hat, tau, &map, false, c);
            resampled = false;
        }
        match trial {
            Ok((shape, s)) if s.grid.perimeter() <= state.perimeter => {
                if resampled {
                    map = shape.symmetry_map().unwrap_or(map);
                }
                since_resample = if resampled { 0 } else { since_resample + 1 };
                state = FlowState::from_snapshot(shape, &s, state.iteration + 1)?;
                snap = s;
                trajectory.push(state.csv_row());
                tau = (2.0 * tau).min(opts.step);
            }
            Ok(_) => tau *= 0.5,
            Err(e @ (Error::SelfIntersection(_) | Error::NonMonotoneProfile(_) | Error::NoBracket(..))) => {
                tau *= 0.5;
                if tau < opts.min_step {
                    return Err(e);
                }
            }
            Err(e) => return Err(e),
        }
    };
    Ok(FlowResult { state, status, trajectory, attempts })
}
