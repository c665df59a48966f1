//! Lower bounds for the top of the spectrum of `L` from Rayleigh quotients.

use super::field::{jets, Field};
use super::operator::l_from_jets;
use super::spectrum::profile_spectrum;
use crate::error::{Error, Result};
use crate::geometry::{Layout, QuadratureGrid, Surface};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaEstimate {
    /// Largest quotient found.
    pub value: f64,
    /// Quotient of each trial, in order.
    pub trial_quotients: Vec<f64>,
    /// Top discrete eigenvalue, where the surface supports a spectrum.
    pub spectral_top: Option<f64>,
}

/// `int f L f gamma / int f^2 gamma`.
pub fn rayleigh_quotient(grid: &QuadratureGrid, f: &Field) -> Result<f64> {
    let js = jets(grid, f)?;
    let lf = l_from_jets(grid, &js);
    let num = grid.integrate(&js.iter().zip(&lf).map(|(j, l)| j.val * l).collect::<Vec<_>>());
    let den = grid.integrate(&js.iter().map(|j| j.val * j.val).collect::<Vec<_>>());
    let total: f64 = grid.weight.iter().sum();
    if !(den > 1e-24 * total) {
        return Err(Error::DegenerateTrial(format!("weighted L2 norm squared is {den:.3e}")));
    }
    Ok(num / den)
}

/// Constants, the normal components `<e_i, N>` and `H - lambda`; the subset
/// that is rotation invariant on revolution surfaces.
pub fn default_trials(grid: &QuadratureGrid, lambda: f64) -> Vec<Field> {
    let amb = grid.ambient_dim();
    let invariant_only = matches!(grid.layout, Layout::Profile { .. });
    let mut out = vec![Field::Const(1.0)];
    for i in 0..amb {
        if invariant_only && i + 1 != amb {
            continue;
        }
        let mut v = vec![0.0; amb];
        v[i] = 1.0;
        out.push(Field::NormalDot(v));
    }
    out.push(Field::sum(Field::MeanCurvature, Field::Const(-lambda)));
    out
}

/// Estimate of `delta(Sigma)`, the supremum of the Rayleigh quotient of `L`.
pub fn rayleigh_delta(surface: &Surface, grid: &QuadratureGrid, trials: &[Field], use_spectrum: bool) -> Result<DeltaEstimate> {
    grid.check_owner(surface)?;
    if trials.is_empty() {
        return Err(Error::DegenerateTrial("empty trial family".into()));
    }
    let trial_quotients = trials.iter().map(|f| rayleigh_quotient(grid, f)).collect::<Result<Vec<_>>>()?;
    let spectral_top = match (&grid.layout, use_spectrum) {
        (Layout::Cyclic { .. } | Layout::Profile { .. }, true) => Some(profile_spectrum(surface, grid, 1)?.eigenvalues[0]),
        _ => None,
    };
    let value = trial_quotients.iter().copied().chain(spectral_top).fold(f64::NEG_INFINITY, f64::max);
    Ok(DeltaEstimate { value, trial_quotients, spectral_top })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_surface, PlanarCurve, SurfaceSpec};

    #[test]
    fn unit_circle_delta_is_two() {
        let s = make_surface(SurfaceSpec::Curve { curve: PlanarCurve::circle(1.0, 512).unwrap() }).unwrap();
        let g = s.grid(512).unwrap();
        let d = rayleigh_delta(&s, &g, &default_trials(&g, 0.0), true).unwrap();
        assert!((d.value - 2.0).abs() < 1e-6);
        assert!((d.spectral_top.unwrap() - 2.0).abs() < 1e-6);
        // normal components have quotient exactly 1
        assert!((d.trial_quotients[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn self_shrinking_sphere_reaches_two() {
        let n = 3;
        let s = make_surface(SurfaceSpec::Sphere { r: (n as f64).sqrt(), n }).unwrap();
        let g = s.grid(1024).unwrap();
        let d = rayleigh_delta(&s, &g, &[Field::MeanCurvature], false).unwrap();
        assert!(d.value >= 2.0 - 1e-12);
    }

    #[test]
    fn zero_trial_is_degenerate() {
        let s = make_surface(SurfaceSpec::Sphere { r: 1.0, n: 1 }).unwrap();
        let g = s.grid(64).unwrap();
        assert!(matches!(rayleigh_delta(&s, &g, &[Field::Const(0.0)], false), Err(Error::DegenerateTrial(_))));
        assert!(matches!(rayleigh_delta(&s, &g, &[], false), Err(Error::DegenerateTrial(_))));
    }
}
