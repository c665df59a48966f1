//! Curvature integrals that decide whether a lambda-surface can minimize
//! Gaussian perimeter, and nodal domains of rotation fields.

use super::forms::{dilation_balance, dilation_balance_closed_form, quadratic_form, require_lambda_surface};
use super::random::curvature_triple_integral;
use crate::error::{Error, Result};
use crate::geometry::poly::Poly;
use crate::geometry::text::format_surface;
use crate::geometry::{AntisymmetricGenerator, Layout, QuadratureGrid, Surface};
use crate::stability::field::Field;
use serde::Serialize;

/// What a satisfied condition implies for a minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Consequence {
    /// A minimizer satisfying the condition is a round cylinder `r S^k x R^(n-k)`.
    RoundCylinder,
    /// No minimizer satisfies the condition.
    NotMinimizer,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub condition: &'static str,
    pub holds: bool,
    pub consequence: Consequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Ruled out as a minimizer.
    Excluded,
    /// A round cylinder on which some classification condition holds.
    RoundCylinder,
    /// No condition applies.
    PossibleMinimizer,
}

/// An admissible test function (even, mean zero) and its stability form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub name: String,
    pub value: f64,
    /// `int f^2 gamma`.
    pub norm_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForms {
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
    #[serde(rename = "I3")]
    pub i3: f64,
    #[serde(rename = "I4")]
    pub i4: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub surface: String,
    pub lambda: f64,
    /// `int (||A||^2 - 1) gamma`.
    #[serde(rename = "I1")]
    pub i1: f64,
    /// `int (||A||^2 - 1 + 2 sup ||A||_op^2) gamma`.
    #[serde(rename = "I2")]
    pub i2: f64,
    /// Triple integral of `(1 - ||A_x||^2 - 2 ||A_y||_op^2) ||Pi_y N_z||^2`.
    #[serde(rename = "I3")]
    pub i3: f64,
    /// `int (-||A||^2 + H int gamma / int <y,N> gamma) gamma`; absent when `int <x,N> gamma = 0`.
    #[serde(rename = "I4")]
    pub i4: Option<f64>,
    /// `-lambda int <x,N> gamma`.
    pub lambda_support: f64,
    /// `-int H gamma * int <x,N> gamma`.
    pub mean_curvature_support: f64,
    /// Spread `max - min` of `H / ||A||`; absent on flat surfaces.
    pub huisken_defect: Option<f64>,
    pub solid_convex: bool,
    pub complement_convex: bool,
    pub witness: Option<Witness>,
    pub closed_form: Option<ClosedForms>,
    pub verdicts: Vec<Verdict>,
    pub status: Status,
}

fn closed_forms(surface: &Surface) -> Option<ClosedForms> {
    let m = surface.round_model()?;
    let (k, r) = (m.k as f64, m.r);
    let p = m.perimeter();
    let op = if m.k > 0 { 1.0 / (r * r) } else { 0.0 };
    let a2 = k / (r * r);
    Some(ClosedForms {
        i1: (a2 - 1.0) * p,
        i2: (a2 - 1.0 + 2.0 * op) * p,
        i3: p * p * p * k / (k + 1.0) * (1.0 - a2 - 2.0 * op),
        i4: dilation_balance_closed_form(surface),
    })
}

fn round_witnesses(grid: &QuadratureGrid) -> Vec<(String, Field)> {
    let Some(m) = &grid.round else { return vec![] };
    let d = grid.ambient_dim();
    let mut out = vec![];
    if m.k >= 1 {
        out.push(("x1 x2".to_string(), Field::Poly(Poly::coord(d, 0).mul(&Poly::coord(d, 1)))));
    }
    if m.k < m.n {
        let z = Poly::coord(d, m.k + 1);
        out.push(("z^2 - 1".to_string(), Field::Poly(z.mul(&z).add(&Poly::constant(d, -1.0)))));
    }
    out
}

fn centered(grid: &QuadratureGrid, name: &str, f: Field) -> Option<(String, Field)> {
    let v = f.values(grid).ok()?;
    let mean = grid.integrate(&v) / grid.perimeter();
    let spread = v.iter().map(|x| (x - mean).abs()).fold(0.0f64, f64::max);
    (spread > 1e-8 * (1.0 + mean.abs())).then(|| (name.to_string(), Field::sum(f, Field::Const(-mean))))
}

/// Best admissible test function among a small fixed family.
fn best_witness(grid: &QuadratureGrid) -> Option<Witness> {
    let mut cands = round_witnesses(grid);
    if grid.round.is_none() && !matches!(grid.layout, Layout::Tensor(_)) {
        cands.extend(centered(grid, "H - mean", Field::MeanCurvature));
        cands.extend(centered(grid, "|x|^2 - mean", Field::NormSq));
    }
    let mut best: Option<Witness> = None;
    for (name, f) in cands {
        let Ok(value) = quadratic_form(grid, &f, true) else { continue };
        let Ok(v) = f.values(grid) else { continue };
        let norm_sq = grid.integrate(&v.iter().map(|x| x * x).collect::<Vec<_>>());
        if best.as_ref().is_none_or(|b| value / norm_sq > b.value / b.norm_sq) {
            best = Some(Witness { name, value, norm_sq });
        }
    }
    best
}

/// Evaluates every classification condition on a lambda-surface.
pub fn theorem_report(surface: &Surface, grid: &QuadratureGrid, lambda: f64) -> Result<ConditionReport> {
    grid.check_owner(surface)?;
    require_lambda_surface(surface, grid, lambda)?;
    let p = grid.perimeter();
    let sup_op = grid.points.iter().map(|q| q.a_op2).fold(0.0f64, f64::max);
    let i1 = grid.integrate_with(|q| q.a_norm2 - 1.0);
    let i2 = i1 + 2.0 * sup_op * p;
    let i3 = curvature_triple_integral(grid);
    let i4 = match dilation_balance(surface, grid) {
        Ok(v) => Some(v),
        Err(Error::ZeroDenominator(_)) => None,
        Err(e) => return Err(e),
    };
    let xn = grid.integrate_with(|q| q.support());
    let lambda_support = -lambda * xn;
    let mean_curvature_support = -grid.integrate_with(|q| q.h) * xn;
    let ratios: Vec<f64> = grid.points.iter().filter(|q| q.a_norm2 > 1e-24).map(|q| q.h / q.a_norm2.sqrt()).collect();
    let huisken_defect = (!ratios.is_empty()).then(|| {
        let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo
    });
    let kmax = grid.points.iter().flat_map(|q| q.principal.iter()).fold(0.0f64, |m, k| m.max(k.abs()));
    let tol = 1e-9 * kmax.max(1e-300);
    let solid_convex = grid.points.iter().all(|q| q.principal.iter().all(|&k| k <= tol));
    let complement_convex = grid.points.iter().all(|q| q.principal.iter().all(|&k| k >= -tol));
    let convex = solid_convex || complement_convex;
    // signs are read with a relative rounding band so that exact zeros stay zero
    let band = 1e-9;
    let abs_h = grid.integrate_with(|q| q.h.abs());
    let abs_xn = grid.integrate_with(|q| q.support().abs());
    let pos = |v: f64, scale: f64| v > band * scale;
    let neg = |v: f64, scale: f64| v < -band * scale;
    let curv_scale = grid.integrate_with(|q| q.a_norm2 + 1.0) + 2.0 * sup_op * p;
    let excess = pos(i1, curv_scale);
    let lambda_pos = pos(lambda, 1.0 + abs_h / p);
    let lambda_neg = neg(lambda, 1.0 + abs_h / p);

    use Consequence::*;
    let mut verdicts = vec![
        Verdict { condition: "convex-curvature-excess", holds: convex && excess, consequence: RoundCylinder },
        Verdict { condition: "curvature-deficit", holds: neg(i2, curv_scale), consequence: RoundCylinder },
        Verdict {
            condition: "curvature-excess-with-lambda-support",
            holds: excess && pos(lambda_support, (1.0 + lambda.abs()) * abs_xn),
            consequence: RoundCylinder,
        },
        Verdict { condition: "mean-curvature-support", holds: pos(mean_curvature_support, abs_h * abs_xn), consequence: RoundCylinder },
        Verdict { condition: "random-bilinear", holds: pos(i3, curv_scale * p * p), consequence: RoundCylinder },
        Verdict { condition: "negative-lambda-excess", holds: lambda_neg && excess, consequence: RoundCylinder },
        Verdict { condition: "positive-lambda-convex", holds: lambda_pos && solid_convex, consequence: RoundCylinder },
    ];
    if surface.is_compact() && solid_convex {
        if let Some(v) = i4 {
            verdicts.push(Verdict { condition: "dilation-balance-negative", holds: neg(v, curv_scale), consequence: NotMinimizer });
        }
    }
    let witness = best_witness(grid);
    let unstable = witness.as_ref().is_some_and(|w| w.value > 1e-8 * w.norm_sq);
    let round = surface.is_round();
    let status = if unstable || verdicts.iter().any(|v| v.holds && (v.consequence == NotMinimizer || !round)) {
        Status::Excluded
    } else if verdicts.iter().any(|v| v.holds) {
        Status::RoundCylinder
    } else {
        Status::PossibleMinimizer
    };
    Ok(ConditionReport {
        surface: format_surface(surface),
        lambda,
        i1,
        i2,
        i3,
        i4,
        lambda_support,
        mean_curvature_support,
        huisken_defect,
        solid_convex,
        complement_convex,
        witness,
        closed_form: closed_forms(surface),
        verdicts,
        status,
    })
}

/// Sign components of `<Qx, N>` and its Gaussian mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalReport {
    pub count: usize,
    /// `|int <Qx,N> gamma|`.
    pub mean_defect: f64,
    /// More than four nodal domains rule out a minimizer.
    pub excludes_minimizer: bool,
}

pub const NODAL_ZERO_BAND: f64 = 1e-9;

/// Counts connected components of `{<Qx,N> > band}` and `{<Qx,N> < -band}`
/// by flood fill over the grid adjacency.
pub fn nodal_domains(surface: &Surface, q: &AntisymmetricGenerator, grid: &QuadratureGrid) -> Result<NodalReport> {
    grid.check_owner(surface)?;
    if !surface.is_compact() {
        return Err(Error::Precondition("nodal domains are counted on closed surfaces".into()));
    }
    if q.dim() != grid.ambient_dim() {
        return Err(Error::InvalidParameter(format!("generator acts on R^{}, surface lives in R^{}", q.dim(), grid.ambient_dim())));
    }
    let f = Field::Rotation(q.clone()).values(grid)?;
    let len = grid.len();
    let sign = |v: f64| {
        if v > NODAL_ZERO_BAND {
            1
        } else if v < -NODAL_ZERO_BAND {
            -1
        } else {
            0
        }
    };
    let mut seen = vec![false; len];
    let mut count = 0;
    for start in 0..len {
        let s = sign(f[start]);
        if seen[start] || s == 0 {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in grid.layout.neighbors(i, len) {
                if j >= len {
                    return Err(Error::AdjacencyUnavailable);
                }
                if !seen[j] && sign(f[j]) == s {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    Ok(NodalReport { count, mean_defect: grid.integrate(&f).abs(), excludes_minimizer: count > 4 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_surface, PlanarCurve, SurfaceSpec};

    fn report(spec: SurfaceSpec, complement: bool) -> (Surface, ConditionReport) {
        let s = make_surface(spec).unwrap().with_complement(complement);
        let g = s.grid(512).unwrap();
        let lambda = s.round_model().unwrap().lambda();
        let rep = theorem_report(&s, &g, lambda).unwrap();
        (s, rep)
    }

    #[test]
    fn cylinder_closed_forms_agree() {
        for (r, k, n) in [(0.7, 1, 2), (1.3, 2, 3), (2.5, 1, 3), (1.1, 0, 2), (1.5, 2, 2)] {
            for c in [false, true] {
                let (_, rep) = report(SurfaceSpec::Cylinder { r, k, n }, c);
                let cf = rep.closed_form.unwrap();
                let scale = 1.0 + cf.i3.abs();
                assert!((rep.i1 - cf.i1).abs() < 1e-8, "{rep:?}");
                assert!((rep.i2 - cf.i2).abs() < 1e-8);
                assert!((rep.i3 - cf.i3).abs() < 1e-8 * scale);
                assert!((rep.i4.unwrap() - cf.i4.unwrap()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn thin_cylinder_fires_excess_and_is_unstable() {
        let (_, rep) = report(SurfaceSpec::Cylinder { r: 0.8, k: 1, n: 2 }, false);
        assert!(rep.i1 > 0.0);
        assert!(rep.verdicts.iter().any(|v| v.condition == "convex-curvature-excess" && v.holds));
        assert!(rep.witness.as_ref().unwrap().value > 0.0);
        assert_eq!(rep.status, Status::Excluded);
    }

    #[test]
    fn wide_cylinder_fires_deficit() {
        let (_, rep) = report(SurfaceSpec::Cylinder { r: 2.5, k: 1, n: 2 }, false);
        assert!(rep.i2 < 0.0);
        assert!(rep.verdicts.iter().any(|v| v.condition == "curvature-deficit" && v.holds));
    }

    #[test]
    fn self_shrinking_sphere_has_no_lambda_verdict() {
        let n = 2;
        let (_, rep) = report(SurfaceSpec::Sphere { r: (n as f64).sqrt(), n }, false);
        assert!(rep.lambda_support.abs() < 1e-14);
        let v = rep.verdicts.iter().find(|v| v.condition == "curvature-excess-with-lambda-support").unwrap();
        assert!(!v.holds);
        assert!(rep.huisken_defect.unwrap() < 1e-12);
    }

    #[test]
    fn non_lambda_surfaces_are_rejected() {
        let s = make_surface(SurfaceSpec::Ellipsoid { axes: vec![2.0, 1.0] }).unwrap();
        let g = s.grid(256).unwrap();
        assert!(matches!(theorem_report(&s, &g, 0.0), Err(Error::NotLambdaSurface(_))));
    }

    #[test]
    fn ellipse_has_four_nodal_domains() {
        let s = make_surface(SurfaceSpec::Ellipsoid { axes: vec![2.0, 1.0] }).unwrap();
        let g = s.grid(512).unwrap();
        let q = AntisymmetricGenerator::new(vec![0.0, 1.0, -1.0, 0.0], 2).unwrap();
        let rep = nodal_domains(&s, &q, &g).unwrap();
        assert_eq!(rep.count, 4);
        assert!(rep.mean_defect < 1e-12);
        assert!(!rep.excludes_minimizer);
    }

    #[test]
    fn circle_has_no_nodal_domains() {
        let s = make_surface(SurfaceSpec::Curve { curve: PlanarCurve::circle(1.3, 256).unwrap() }).unwrap();
        let g = s.grid(256).unwrap();
        let rep = nodal_domains(&s, &AntisymmetricGenerator::plane(2, 0, 1), &g).unwrap();
        assert_eq!(rep.count, 0);
    }

    #[test]
    fn wavy_curve_is_excluded() {
        let c = PlanarCurve::polar_wave(1.0, 0.3, 6, 1024).unwrap();
        let s = make_surface(SurfaceSpec::Curve { curve: c }).unwrap();
        let g = s.grid(1024).unwrap();
        let rep = nodal_domains(&s, &AntisymmetricGenerator::plane(2, 0, 1), &g).unwrap();
        assert_eq!(rep.count, 12);
        assert!(rep.excludes_minimizer);
        assert!(rep.mean_defect < 1e-10);
    }

    #[test]
    fn sphere_rotation_field_vanishes() {
        let s = make_surface(SurfaceSpec::Sphere { r: 1.0, n: 2 }).unwrap();
        let g = s.grid(256).unwrap();
        let rep = nodal_domains(&s, &AntisymmetricGenerator::plane(3, 0, 2), &g).unwrap();
        assert_eq!(rep.count, 0);
        let cyl = make_surface(SurfaceSpec::Cylinder { r: 1.0, k: 1, n: 2 }).unwrap();
        let g = cyl.grid(256).unwrap();
        assert!(matches!(nodal_domains(&cyl, &AntisymmetricGenerator::plane(3, 0, 1), &g), Err(Error::Precondition(_))));
    }
}
