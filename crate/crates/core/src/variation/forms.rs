//! Quadratic forms of the stability operator used to rule out minimizers.

use super::formulas::check_even;
use crate::error::{Error, Result};
use crate::geometry::{QuadratureGrid, Surface};
use crate::stability::field::{jets, Field};
use crate::stability::identity::LAMBDA_TOLERANCE;
use crate::stability::operator::l_from_jets;
use serde::Serialize;

/// `int f L f gamma`. In witness mode `f` must be even and have zero
/// Gaussian mean, so that a positive value rules out a minimizer.
pub fn quadratic_form(grid: &QuadratureGrid, f: &Field, witness: bool) -> Result<f64> {
    let js = jets(grid, f)?;
    let vals: Vec<f64> = js.iter().map(|j| j.val).collect();
    if witness {
        check_even(grid, &vals)?;
        let mean = grid.integrate(&vals);
        let mass: f64 = vals.iter().zip(&grid.weight).map(|(v, w)| v.abs() * w).sum();
        if mean.abs() > 1e-9 * mass.max(1e-300) {
            return Err(Error::NotMeanZero(mean / grid.perimeter()));
        }
    }
    let lf = l_from_jets(grid, &js);
    Ok(grid.integrate(&vals.iter().zip(&lf).map(|(a, b)| a * b).collect::<Vec<_>>()))
}

pub(crate) fn require_lambda_surface(surface: &Surface, grid: &QuadratureGrid, lambda: f64) -> Result<()> {
    let stats = surface.lambda_residual(lambda, grid)?;
    if !(stats.max <= LAMBDA_TOLERANCE) {
        return Err(Error::NotLambdaSurface(stats.max));
    }
    Ok(())
}

/// Both sides of `int (1+g) L (1+g) gamma = int (delta (1+g)^2 + ||A||^2 + 1 - delta) gamma`
/// for a positive eigenfunction `L g = delta g`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbReport {
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
    /// `max |L g - delta g| / max |g|`.
    pub eigen_residual: f64,
    /// `int (||A||^2 - 1) gamma`.
    pub curvature_excess: f64,
    /// True when `lambda < 0`, the curvature excess is positive and `1 + g`
    /// (rescaled to zero mean) is a destabilizing direction.
    pub excludes_minimizer: bool,
}

pub fn perturb_eigen(surface: &Surface, grid: &QuadratureGrid, lambda: f64, g: &Field, delta: f64, tol: f64) -> Result<PerturbReport> {
    grid.check_owner(surface)?;
    let js = jets(grid, g)?;
    let gv: Vec<f64> = js.iter().map(|j| j.val).collect();
    let gmin = gv.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(gmin > 0.0) {
        return Err(Error::Precondition(format!("eigenfunction must be positive, minimum {gmin:.3e}")));
    }
    let gmax = gv.iter().cloned().fold(0.0f64, f64::max);
    let lg = l_from_jets(grid, &js);
    let eigen_residual = lg.iter().zip(&gv).map(|(l, v)| (l - delta * v).abs()).fold(0.0f64, f64::max) / gmax;
    if !(eigen_residual <= tol) {
        return Err(Error::NotEigenfunction(eigen_residual));
    }
    // L(1 + g) = ||A||^2 + 1 + L g, with L g evaluated on the grid
    let lhs = grid.integrate(&(0..grid.len()).map(|i| (1.0 + gv[i]) * (grid.points[i].a_norm2 + 1.0 + lg[i])).collect::<Vec<_>>());
    let rhs = grid.integrate_with(|p| p.a_norm2 + 1.0 - delta) + delta * grid.integrate(&gv.iter().map(|v| (1.0 + v) * (1.0 + v)).collect::<Vec<_>>());
    let curvature_excess = grid.integrate_with(|p| p.a_norm2 - 1.0);
    Ok(PerturbReport {
        lhs,
        rhs,
        defect: (lhs - rhs).abs(),
        eigen_residual,
        curvature_excess,
        excludes_minimizer: lambda < 0.0 && curvature_excess > 0.0 && (1.0..=2.0).contains(&delta),
    })
}

/// `int (H+b) L (H+b) gamma` with `b` chosen so that `H + b` has zero mean,
/// against its closed expression on lambda-surfaces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftReport {
    pub b: f64,
    pub lhs: f64,
    /// `int (2 (H+b)^2 + (b+lambda)^2 ||A||^2) gamma + b int <x,N> gamma`.
    pub rhs: f64,
    /// `int (2 (H+b)^2 + (b+lambda)^2 (||A||^2 - 1)) gamma - lambda int <x,N> gamma`.
    pub rhs_alt: f64,
    pub defect: f64,
}

pub fn mean_curvature_shift(surface: &Surface, grid: &QuadratureGrid, lambda: f64) -> Result<ShiftReport> {
    grid.check_owner(surface)?;
    require_lambda_surface(surface, grid, lambda)?;
    let p = grid.perimeter();
    let b = -grid.integrate_with(|q| q.h) / p;
    let f = Field::sum(Field::MeanCurvature, Field::Const(b));
    let lhs = quadratic_form(grid, &f, false)?;
    let xn = grid.integrate_with(|q| q.support());
    let c = (b + lambda) * (b + lambda);
    let rhs = grid.integrate_with(|q| 2.0 * (q.h + b).powi(2) + c * q.a_norm2) + b * xn;
    let rhs_alt = grid.integrate_with(|q| 2.0 * (q.h + b).powi(2) + c * (q.a_norm2 - 1.0)) - lambda * xn;
    Ok(ShiftReport { b, lhs, rhs, rhs_alt, defect: (lhs - rhs).abs().max((lhs - rhs_alt).abs()) })
}

fn support_integral(grid: &QuadratureGrid) -> Result<f64> {
    let x = grid.integrate_with(|q| q.support());
    let scale = grid.integrate_with(|q| q.support().abs());
    if x.abs() <= 1e-13 * scale.max(1e-300) {
        return Err(Error::ZeroDenominator("int <x,N> gamma".into()));
    }
    Ok(x)
}

/// Value of the volume-preserving second variation with dilation
/// `h = 2 int f gamma / int <x,N> gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DilationForm {
    pub h: f64,
    pub value: f64,
}

/// `int (-f L f + 2 h f <x,N> - (h^2/2) <x,N>^2 + lambda (h^2/4) <x,N>) gamma`
/// for a positive speed `f`.
pub fn dilation_form(surface: &Surface, grid: &QuadratureGrid, lambda: f64, f: &Field) -> Result<DilationForm> {
    grid.check_owner(surface)?;
    let js = jets(grid, f)?;
    let fv: Vec<f64> = js.iter().map(|j| j.val).collect();
    let fmin = fv.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(fmin > 0.0) {
        return Err(Error::Precondition(format!("the dilation form is defined for positive speeds, minimum {fmin:.3e}")));
    }
    let x = support_integral(grid)?;
    let h = 2.0 * grid.integrate(&fv) / x;
    let lf = l_from_jets(grid, &js);
    let value = grid.integrate(
        &(0..grid.len())
            .map(|i| {
                let xn = grid.points[i].support();
                -fv[i] * lf[i] + 2.0 * h * fv[i] * xn - 0.5 * h * h * xn * xn + 0.25 * lambda * h * h * xn
            })
            .collect::<Vec<_>>(),
    );
    Ok(DilationForm { h, value })
}

/// Second derivative in `t` of the dilation form at `f = H - lambda + t`.
/// The form is quadratic in `t`, so this is twice the form evaluated on the
/// pair `(1, 2 int gamma / int <x,N> gamma)`.
pub fn dilation_form_curvature(surface: &Surface, grid: &QuadratureGrid, lambda: f64) -> Result<f64> {
    grid.check_owner(surface)?;
    let x = support_integral(grid)?;
    let h = 2.0 * grid.perimeter() / x;
    Ok(2.0
        * grid.integrate_with(|q| {
            let xn = q.support();
            -(q.a_norm2 + 1.0) + 2.0 * h * xn - 0.5 * h * h * xn * xn + 0.25 * lambda * h * h * xn
        }))
}

/// `int (-||A||^2 + H int gamma / int <y,N> gamma) gamma`, which vanishes on
/// round spheres and cylinders.
pub fn dilation_balance(surface: &Surface, grid: &QuadratureGrid) -> Result<f64> {
    grid.check_owner(surface)?;
    let x = support_integral(grid)?;
    let ratio = grid.perimeter() / x;
    Ok(grid.integrate_with(|q| -q.a_norm2 + q.h * ratio))
}

/// Closed form of [`dilation_balance`] on spheres, cylinders and strips.
pub fn dilation_balance_closed_form(surface: &Surface) -> Option<f64> {
    // ||A||^2 = k / r^2 and H / <x,N> = (k/r) / r cancel exactly
    surface.round_model().map(|_| 0.0)
}
