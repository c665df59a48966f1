//! Gaussian volumes and Gaussian surface areas.
//!
//! Round solids use chi and chi-squared distribution functions. Bounded
//! solids without a closed form use the divergence theorem with the radial
//! field `V(x) = x psi(|x|)`, `psi(rho) = P(|Z| <= rho) / (|S^n| rho^(n+1))`,
//! whose divergence is the Gaussian density, so `vol = int <x,N> psi dA`.

use crate::error::{Error, Result};
use crate::geometry::{make_surface, QuadratureGrid, Surface, SurfaceSpec};
use crate::roots::{find_root, find_root_expanding, RootOptions};
use crate::special::{chi2_cdf, chi_cdf, erf, ln_sphere_area, norm_cdf, norm_pdf, sphere_area};
use serde::Serialize;
use std::f64::consts::PI;

/// Grid resolution used when a measure has no closed form.
pub const DEFAULT_RESOLUTION: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureResult {
    pub value: f64,
    pub method: Method,
    /// Zero for closed forms; the change under halving the resolution for quadrature.
    pub error: f64,
}

impl MeasureResult {
    fn exact(value: f64) -> Self {
        Self { value, method: Method::ClosedForm, error: 0.0 }
    }
}

/// Gaussian measure of the solid bounded by `surface` (its complement if flagged).
pub fn gaussian_volume(surface: &Surface) -> Result<MeasureResult> {
    let inside = match surface.spec() {
        SurfaceSpec::Sphere { r, n } => MeasureResult::exact(chi_cdf((n + 1) as f64, *r)?),
        SurfaceSpec::Cylinder { r, k, .. } => MeasureResult::exact(chi2_cdf((k + 1) as f64, r * r)?),
        SurfaceSpec::Strip { t, .. } => MeasureResult::exact(erf(t / std::f64::consts::SQRT_2)),
        _ if surface.is_compact() => {
            let flux = |res| -> Result<f64> {
                let f = volume_on_grid(&surface.grid(res)?)?;
                Ok(if surface.is_complement() { 1.0 + f } else { f })
            };
            let (fine, coarse) = (flux(DEFAULT_RESOLUTION)?, flux(DEFAULT_RESOLUTION / 2)?);
            return Ok(MeasureResult { value: fine, method: Method::Quadrature, error: (fine - coarse).abs() });
        }
        other => return Err(Error::UnboundedRegionWithoutClosedForm(other.kind().into())),
    };
    Ok(if surface.is_complement() { MeasureResult { value: 1.0 - inside.value, ..inside } } else { inside })
}

/// Flux of the radial field through the grid: the enclosed volume when the
/// normals point out of the solid, its negative for a complement grid.
pub fn volume_on_grid(grid: &QuadratureGrid) -> Result<f64> {
    let dof = grid.ambient_dim() as f64;
    let sn = sphere_area(grid.ambient_dim() - 1);
    let mut total = 0.0;
    for (p, da) in grid.points.iter().zip(&grid.area) {
        let rho = crate::linalg::norm(&p.x);
        let psi = if rho < 1e-6 {
            // small-rho limit of P(|Z| <= rho) / (|S^n| rho^(n+1))
            (2.0 * PI).powf(-0.5 * dof) / dof
        } else {
            chi_cdf(dof, rho)? / (sn * rho.powf(dof))
        };
        total += p.support() * psi * da;
    }
    Ok(total)
}

/// Gaussian surface area, closed form on round surfaces.
pub fn gaussian_perimeter(surface: &Surface) -> Result<MeasureResult> {
    if let Some(m) = surface.round_model() {
        return Ok(MeasureResult::exact(m.perimeter()));
    }
    let fine = surface.grid(DEFAULT_RESOLUTION)?.perimeter();
    let coarse = surface.grid(DEFAULT_RESOLUTION / 2)?.perimeter();
    Ok(MeasureResult { value: fine, method: Method::Quadrature, error: (fine - coarse).abs() })
}

/// Quadrature perimeter on a grid owned by `surface`.
pub fn perimeter_on_grid(surface: &Surface, grid: &QuadratureGrid) -> Result<MeasureResult> {
    grid.check_owner(surface)?;
    Ok(MeasureResult { value: grid.perimeter(), method: Method::Quadrature, error: 0.0 })
}

/// One-parameter families of solids for the volume constraint.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Balls of radius `r` in `R^(n+1)`.
    Ball { n: usize },
    /// Solid cylinders `r B^(k+1) x R^(n-k)`; `k = 0` is the slab of half-width `r`.
    Cylinder { k: usize, n: usize },
    /// Dilates `s * spec` of a bounded solid.
    Scaled(SurfaceSpec),
}

impl Family {
    /// The member at parameter `p`.
    pub fn member(&self, p: f64, complement: bool) -> Result<Surface> {
        let spec = match self {
            Family::Ball { n } => SurfaceSpec::Sphere { r: p, n: *n },
            Family::Cylinder { k, n } => SurfaceSpec::Cylinder { r: p, k: *k, n: *n },
            Family::Scaled(spec) => scale_spec(spec, p)?,
        };
        Ok(make_surface(spec)?.with_complement(complement))
    }
}

/// Multiplies every length of a spec by `s`.
pub fn scale_spec(spec: &SurfaceSpec, s: f64) -> Result<SurfaceSpec> {
    if !(s > 0.0) {
        return Err(Error::NonPositiveRadius(s));
    }
    Ok(match spec {
        SurfaceSpec::Sphere { r, n } => SurfaceSpec::Sphere { r: r * s, n: *n },
        SurfaceSpec::Cylinder { r, k, n } => SurfaceSpec::Cylinder { r: r * s, k: *k, n: *n },
        SurfaceSpec::Strip { t, n } => SurfaceSpec::Strip { t: t * s, n: *n },
        SurfaceSpec::Ellipsoid { axes } => SurfaceSpec::Ellipsoid { axes: axes.iter().map(|a| a * s).collect() },
        SurfaceSpec::Curve { curve } => SurfaceSpec::Curve { curve: curve.scaled(s)? },
        SurfaceSpec::Profile { profile, n } => SurfaceSpec::Profile { profile: profile.scaled(s)?, n: *n },
    })
}

/// Parameter at which the family member (or its complement) has Gaussian volume `c`.
pub fn solve_constraint(family: &Family, c: f64, complement: bool) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter(format!("target volume must lie in (0,1), got {c}")));
    }
    let target = if complement { 1.0 - c } else { c };
    let vol = |p: f64| -> Result<f64> { Ok(gaussian_volume(&family.member(p, false)?)?.value) };
    let opts = RootOptions { xtol: 1e-15, ftol: 1e-15, ..Default::default() };
    match family {
        Family::Ball { n } => find_root(|r| chi_cdf((n + 1) as f64, r).unwrap_or(f64::NAN) - target, 1e-12, 40.0 + 4.0 * (*n as f64).sqrt(), opts),
        Family::Cylinder { k, n: _ } => {
            find_root(|r| chi2_cdf((k + 1) as f64, r * r).unwrap_or(f64::NAN) - target, 1e-12, 40.0 + 4.0 * (*k as f64).sqrt(), opts)
        }
        Family::Scaled(_) => {
            let mut err = None;
            let p = find_root_expanding(
                |s| match vol(s) {
                    Ok(v) => v - target,
                    Err(e) => {
                        err.get_or_insert(e);
                        f64::NAN
                    }
                },
                1e-3,
                2.0,
                1e3,
            );
            match (p, err) {
                (_, Some(e)) => Err(e),
                (p, None) => p,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallExpansion {
    /// `P(chi^2_n <= n + s sqrt(2n))`, the measure of the ball of that squared radius in `R^n`.
    pub exact: f64,
    /// `Phi(s) + (sqrt 2 / 3)(1 - s^2) phi(s) / sqrt n`.
    pub approx: f64,
    /// The `1/sqrt(n)` term of `approx` alone.
    pub correction: f64,
    pub difference: f64,
}

/// First-order Edgeworth expansion of the Gaussian measure of large balls.
pub fn ball_expansion(n: usize, s: f64) -> Result<BallExpansion> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
    }
    let nf = n as f64;
    let r2 = nf + s * (2.0 * nf).sqrt();
    let exact = chi2_cdf(nf, r2.max(0.0))?;
    // the chi-squared skewness sqrt(8/n) enters as (skew / 6)(1 - s^2) phi(s)
    let correction = (2.0f64.sqrt() / 3.0) * (1.0 - s * s) * norm_pdf(s) / nf.sqrt();
    let approx = norm_cdf(s) + correction;
    Ok(BallExpansion { exact, approx, correction, difference: exact - approx })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    /// Ambient dimension.
    pub n: usize,
    pub c: f64,
    /// Radius of the centred ball of measure `c`.
    pub r: f64,
    /// Gaussian surface area of its boundary.
    pub perimeter: f64,
}

/// Radius and boundary area of the measure-`c` centred ball in each ambient dimension.
pub fn profile_table(dims: &[usize], c: f64) -> Result<Vec<ProfileRow>> {
    dims.iter()
        .map(|&d| {
            if d == 0 {
                return Err(Error::InvalidParameter("ambient dimension must be at least 1".into()));
            }
            let r = solve_constraint(&Family::Ball { n: d - 1 }, c, false)?;
            Ok(ProfileRow { n: d, c, r, perimeter: ball_boundary_area(d, r) })
        })
        .collect()
}

/// `|S^(d-1)| r^(d-1) (2 pi)^(-d/2) e^(-r^2/2)`, evaluated in logs.
pub fn ball_boundary_area(d: usize, r: f64) -> f64 {
    if r == 0.0 {
        return if d == 1 { 2.0 / (2.0 * PI).sqrt() } else { 0.0 };
    }
    let df = d as f64;
    (ln_sphere_area(d - 1) + (df - 1.0) * r.ln() - 0.5 * df * (2.0 * PI).ln() - 0.5 * r * r).exp()
}
