//! Spectra of the stability operator: closed form on round spheres and a
//! weighted second-order discretization on closed curves and (for
//! rotation-invariant functions) revolution surfaces.
//!
//! The discrete operator comes from the quadratic form
//! `-sum_e c_e (f_{i+1} - f_i)^2 + sum_i M_i V_i f_i^2` with edge conductances
//! `c_e = w(midpoint) / |edge|`, lumped masses `M_i` and `V = ||A||^2 + 1`,
//! where `w = gamma rho^(n-1)`. Conjugating by `M^(1/2)` gives a symmetric
//! cyclic tridiagonal matrix. Its top eigenvalues are located by bisection on
//! the inertia of `A - sigma I` (Sylvester's law, with an arrowhead `LDL^T`
//! that accounts for the corner entries) and eigenvectors by inverse iteration.

use crate::error::{Error, Result};
use crate::geometry::{Layout, QuadratureGrid, Surface};
use crate::linalg::{dot, norm, solve_cyclic_tridiagonal};
use crate::special::harmonic_multiplicity;
use serde::Serialize;
use std::f64::consts::PI;

/// One degree of the closed-form spectrum on `r S^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralLine {
    pub degree: usize,
    pub eigenvalue: f64,
    pub multiplicity: u64,
}

/// Eigenvalues `1 + (n - l(l+n-1)) / r^2` of `L` on `r S^n`, degrees `0..=l_max`.
pub fn sphere_spectrum(n: usize, r: f64, l_max: usize) -> Result<Vec<SpectralLine>> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("sphere dimension must be at least 1".into()));
    }
    Ok((0..=l_max)
        .map(|l| {
            let lf = l as f64;
            SpectralLine { degree: l, eigenvalue: 1.0 + (n as f64 - lf * (lf + n as f64 - 1.0)) / (r * r), multiplicity: harmonic_multiplicity(n, l) }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Samples at every grid node, normalized in the weighted `L^2` norm.
    pub eigenfunctions: Vec<Vec<f64>>,
    /// Number of profile or curve nodes.
    pub resolution: usize,
    /// Convergence order of the discretization in the node spacing.
    pub order: u32,
}

/// Symmetric cyclic tridiagonal matrix: `diag[i]`, `off[i]` couples `i` and `i+1 mod m`.
#[derive(Debug, Clone)]
pub(crate) struct CyclicSym {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl CyclicSym {
    fn len(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly above `sigma`.
    fn count_above(&self, sigma: f64) -> usize {
        let m = self.len();
        let tiny = f64::MIN_POSITIVE.sqrt();
        let guard = |p: f64| if p.abs() < tiny { -tiny } else { p };
        let last = m - 1;
        let mut pos = 0;
        // pivots of the leading (m-1) x (m-1) tridiagonal block, and the
        // eliminated entries w_i of the last row
        let mut p = guard(self.diag[0] - sigma);
        let mut w = self.off[last];
        let mut schur = self.diag[last] - sigma;
        for i in 0..last {
            if p > 0.0 {
                pos += 1;
            }
            if i + 1 < last {
                let e = self.off[i];
                let w_next = if i + 1 == last - 1 { self.off[last - 1] } else { 0.0 } - e * w / p;
                schur -= w * w / p;
                p = guard(self.diag[i + 1] - sigma - e * e / p);
                w = w_next;
            } else {
                schur -= w * w / p;
            }
        }
        if schur > 0.0 {
            pos += 1;
        }
        pos
    }

    fn gershgorin(&self) -> (f64, f64) {
        let m = self.len();
        (0..m).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let rad = self.off[i].abs() + self.off[(i + m - 1) % m].abs();
            (lo.min(self.diag[i] - rad), hi.max(self.diag[i] + rad))
        })
    }

    /// The `count` largest eigenvalues, descending.
    pub fn top_eigenvalues(&self, count: usize) -> Vec<f64> {
        let (lo0, hi0) = self.gershgorin();
        let scale = lo0.abs().max(hi0.abs()).max(1.0);
        (1..=count)
            .map(|j| {
                let (mut lo, mut hi) = (lo0 - 1e-12 * scale, hi0 + 1e-12 * scale);
                // invariant: count_above(lo) >= j > count_above(hi)
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi || hi - lo < 4.0 * f64::EPSILON * scale {
                        break;
                    }
                    if self.count_above(mid) >= j {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    /// Unit eigenvectors for the given (descending) eigenvalues; vectors of a
    /// numerically repeated eigenvalue are orthogonalized against each other.
    pub fn eigenvectors(&self, vals: &[f64]) -> Result<Vec<Vec<f64>>> {
        let m = self.len();
        let (lo, hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(vals.len());
        for (j, &mu) in vals.iter().enumerate() {
            let shift = mu + 1e-10 * scale;
            let cluster: Vec<usize> = (0..j).filter(|&i| (vals[i] - mu).abs() < 1e-7 * scale).collect();
            let lower: Vec<f64> = (0..m).map(|i| self.off[(i + m - 1) % m]).collect();
            let diag: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
            // deterministic start with components in every low mode
            let mut x: Vec<f64> = (0..m).map(|i| 1.0 + 0.37 * ((i as f64 + 0.5) * (j as f64 + 1.3)).sin()).collect();
            for _ in 0..4 {
                for &c in &cluster {
                    let d = dot(&x, &out[c]);
                    x.iter_mut().zip(&out[c]).for_each(|(a, b)| *a -= d * b);
                }
                let nx = norm(&x);
                x.iter_mut().for_each(|a| *a /= nx);
                x = solve_cyclic_tridiagonal(&lower, &diag, &self.off, &x)?;
            }
            for &c in &cluster {
                let d = dot(&x, &out[c]);
                x.iter_mut().zip(&out[c]).for_each(|(a, b)| *a -= d * b);
            }
            let nx = norm(&x);
            if !(nx.is_finite() && nx > 0.0) {
                return Err(Error::ConvergenceFailure(format!("inverse iteration for eigenvalue {mu}")));
            }
            x.iter_mut().for_each(|a| *a /= nx);
            let s: f64 = x.iter().sum();
            if s < 0.0 {
                x.iter_mut().for_each(|a| *a = -*a);
            }
            out.push(x);
        }
        Ok(out)
    }

    #[cfg(test)]
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let m = self.len();
        (0..m).map(|i| self.diag[i] * x[i] + self.off[i] * x[(i + 1) % m] + self.off[(i + m - 1) % m] * x[(i + m - 1) % m]).collect()
    }
}

/// Discretized operator on the profile or curve nodes, plus the lumped masses.
pub(crate) fn assemble(grid: &QuadratureGrid) -> Result<(CyclicSym, Vec<f64>, usize)> {
    let (pts, ring, n): (Vec<[f64; 2]>, usize, usize) = match &grid.layout {
        Layout::Cyclic { .. } => (grid.points.iter().map(|p| [p.x[0], p.x[1]]).collect(), 1, 1),
        Layout::Profile { rho, ring, .. } => {
            let pts = (0..rho.len()).map(|i| [rho[i], *grid.points[i * ring].x.last().unwrap()]).collect();
            (pts, *ring, grid.dim)
        }
        Layout::Tensor(_) => return Err(Error::UnsupportedSurface("spectra are computed on curves and revolution profiles".into())),
    };
    let m = pts.len();
    let amb = (n + 1) as f64;
    let w = |p: [f64; 2]| (2.0 * PI).powf(-0.5 * amb) * (-0.5 * (p[0] * p[0] + p[1] * p[1])).exp() * if n > 1 { p[0].powi(n as i32 - 1) } else { 1.0 };
    let len: Vec<f64> = (0..m).map(|i| (pts[(i + 1) % m][0] - pts[i][0]).hypot(pts[(i + 1) % m][1] - pts[i][1])).collect();
    let cond: Vec<f64> = (0..m)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % m]);
            w([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]) / len[i]
        })
        .collect();
    let mass: Vec<f64> = (0..m).map(|i| w(pts[i]) * 0.5 * (len[(i + m - 1) % m] + len[i])).collect();
    let pot: Vec<f64> = (0..m).map(|i| grid.points[i * ring].a_norm2 + 1.0).collect();
    let diag = (0..m).map(|i| -(cond[(i + m - 1) % m] + cond[i]) / mass[i] + pot[i]).collect();
    let off = (0..m).map(|i| cond[i] / (mass[i] * mass[(i + 1) % m]).sqrt()).collect();
    Ok((CyclicSym { diag, off }, mass, ring))
}

/// Top `count` eigenpairs of `L` on a closed curve, or on rotation-invariant
/// functions of a revolution surface.
pub fn profile_spectrum(surface: &Surface, grid: &QuadratureGrid, count: usize) -> Result<SpectrumResult> {
    grid.check_owner(surface)?;
    let (op, mass, ring) = assemble(grid)?;
    let m = mass.len();
    if count == 0 || count > m / 4 {
        return Err(Error::InvalidParameter(format!("count must lie in 1..={} for {m} nodes", m / 4)));
    }
    let eigenvalues = op.top_eigenvalues(count);
    let vecs = op.eigenvectors(&eigenvalues)?;
    let surface_mass = if ring > 1 { crate::special::sphere_area(grid.dim - 1) } else { 1.0 };
    let eigenfunctions = vecs
        .into_iter()
        .map(|y| {
            // undo the M^(1/2) conjugation and normalize in the weighted L^2 norm
            let f: Vec<f64> = y.iter().zip(&mass).map(|(a, mi)| a / (mi * surface_mass).sqrt()).collect();
            f.iter().flat_map(|v| std::iter::repeat_n(*v, ring)).collect()
        })
        .collect();
    Ok(SpectrumResult { eigenvalues, eigenfunctions, resolution: m, order: 2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_surface, PlanarCurve, RevolutionProfile, SurfaceSpec};
    use crate::linalg::symmetric_eigenvalues;

    fn random_cyclic(m: usize, seed: u64) -> CyclicSym {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        CyclicSym { diag: (0..m).map(|_| 4.0 * next()).collect(), off: (0..m).map(|_| next()).collect() }
    }

    #[test]
    fn inertia_bisection_matches_dense_solver() {
        for (m, seed) in [(3, 1), (5, 2), (12, 3), (40, 4)] {
            let a = random_cyclic(m, seed);
            let mut dense = vec![0.0; m * m];
            for i in 0..m {
                dense[i * m + i] = a.diag[i];
                let j = (i + 1) % m;
                dense[i * m + j] += a.off[i];
                dense[j * m + i] += a.off[i];
            }
            let want = symmetric_eigenvalues(dense, m).unwrap();
            let got = a.top_eigenvalues(m);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12, "m={m}: {g} vs {w}");
            }
            let vecs = a.eigenvectors(&got).unwrap();
            for (v, mu) in vecs.iter().zip(&got) {
                let av = a.apply(v);
                let res = av.iter().zip(v).fold(0.0f64, |acc, (x, y)| acc.max((x - mu * y).abs()));
                assert!(res < 1e-9, "m={m} mu={mu} res={res}");
            }
        }
    }

    #[test]
    fn closed_form_sphere_spectrum() {
        let s = sphere_spectrum(2, 2.0, 3).unwrap();
        assert_eq!(s[0].eigenvalue, 1.5);
        assert_eq!(s[1].eigenvalue, 1.0);
        assert_eq!(s[2].eigenvalue, 0.0);
        assert_eq!(s[2].multiplicity, 5);
        assert_eq!(s[3].multiplicity, 7);
    }

    #[test]
    fn circle_spectrum_and_second_order_convergence() {
        let err_at = |m: usize| {
            let c = PlanarCurve::circle(1.0, m).unwrap();
            let s = make_surface(SurfaceSpec::Curve { curve: c }).unwrap();
            let g = s.grid(m).unwrap();
            let sp = profile_spectrum(&s, &g, 9).unwrap();
            let exact = [2.0, 1.0, 1.0, -2.0, -2.0, -7.0, -7.0, -14.0, -14.0];
            sp.eigenvalues.iter().zip(exact).fold(0.0f64, |a, (x, e)| a.max((x - e).abs() / e.abs()))
        };
        let (e1, e2) = (err_at(512), err_at(1024));
        assert!(e2 < 1e-3, "{e2}");
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn top_eigenfunction_is_positive_and_normalized() {
        let c = PlanarCurve::polar_wave(1.2, 0.2, 4, 256).unwrap();
        let s = make_surface(SurfaceSpec::Curve { curve: c }).unwrap();
        let g = s.grid(256).unwrap();
        let sp = profile_spectrum(&s, &g, 4).unwrap();
        let f = &sp.eigenfunctions[0];
        assert!(f.iter().all(|v| *v > 0.0));
        let nrm = g.integrate(&f.iter().map(|v| v * v).collect::<Vec<_>>());
        assert!((nrm - 1.0).abs() < 1e-2);
    }

    #[test]
    fn revolution_profile_of_a_sphere_reproduces_invariant_spectrum() {
        // the unit sphere S^2 is not a closed loop in rho > 0; use a torus and
        // compare against a dense solve of the same discretization instead
        let s = make_surface(SurfaceSpec::Profile { profile: RevolutionProfile::circle(2.5, 0.8, 64).unwrap(), n: 2 }).unwrap();
        let g = s.grid(64).unwrap();
        let sp = profile_spectrum(&s, &g, 8).unwrap();
        let (op, _, _) = assemble(&g).unwrap();
        let m = op.diag.len();
        let mut dense = vec![0.0; m * m];
        for i in 0..m {
            dense[i * m + i] = op.diag[i];
            let j = (i + 1) % m;
            dense[i * m + j] += op.off[i];
            dense[j * m + i] += op.off[i];
        }
        let want = symmetric_eigenvalues(dense, m).unwrap();
        for (a, b) in sp.eigenvalues.iter().zip(&want) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(sp.eigenfunctions[0].len(), g.len());
    }

    #[test]
    fn count_guard() {
        let c = PlanarCurve::circle(1.0, 64).unwrap();
        let s = make_surface(SurfaceSpec::Curve { curve: c }).unwrap();
        let g = s.grid(64).unwrap();
        assert!(profile_spectrum(&s, &g, 17).is_err());
    }
}
