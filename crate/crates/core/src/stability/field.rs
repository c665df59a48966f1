//! Scalar test functions on a surface and their tangential derivatives.
//!
//! Three derivative paths are used:
//! - round surfaces: the field is rewritten as an ambient polynomial, using the
//!   linear normal field `N(x) = sign P_k x / r`, and differentiated exactly via
//!   `Delta F = tr D^2F - <D^2F N, N> - H <DF, N>`;
//! - closed curves: finite differences in arclength;
//! - revolution surfaces: rotation-invariant fields only, with
//!   `Delta f = f_ss + (n-1) (rho_s / rho) f_s` along the profile.

use crate::error::{Error, Result};
use crate::geometry::poly::Poly;
use crate::geometry::{AntisymmetricGenerator, CurvaturePoint, Layout, QuadratureGrid, RoundModel};
use crate::linalg::dot;

/// A scalar function on the surface, described symbolically where possible.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Const(f64),
    /// `<v, x>`.
    PositionDot(Vec<f64>),
    /// `<v, N>`.
    NormalDot(Vec<f64>),
    /// `<Q x, N>`.
    Rotation(AntisymmetricGenerator),
    /// `|x|^2`.
    NormSq,
    /// `<x, N>`.
    Support,
    /// `H`.
    MeanCurvature,
    /// `||A||`.
    NormA,
    /// Restriction of an ambient polynomial.
    Poly(Poly),
    /// Nodal values on a specific grid.
    Samples(Vec<f64>),
    Sum(Box<Field>, Box<Field>),
    Product(Box<Field>, Box<Field>),
    Scale(f64, Box<Field>),
}

impl Field {
    pub fn sum(a: Field, b: Field) -> Field {
        Field::Sum(Box::new(a), Box::new(b))
    }

    pub fn product(a: Field, b: Field) -> Field {
        Field::Product(Box::new(a), Box::new(b))
    }

    pub fn scale(c: f64, a: Field) -> Field {
        Field::Scale(c, Box::new(a))
    }

    /// Values at the grid nodes.
    pub fn values(&self, grid: &QuadratureGrid) -> Result<Vec<f64>> {
        Ok(match self {
            Field::Samples(v) => {
                grid.check_len(v)?;
                v.clone()
            }
            Field::Sum(a, b) => {
                let (a, b) = (a.values(grid)?, b.values(grid)?);
                a.iter().zip(&b).map(|(x, y)| x + y).collect()
            }
            Field::Product(a, b) => {
                let (a, b) = (a.values(grid)?, b.values(grid)?);
                a.iter().zip(&b).map(|(x, y)| x * y).collect()
            }
            Field::Scale(c, a) => a.values(grid)?.iter().map(|x| c * x).collect(),
            other => {
                let mut out = Vec::with_capacity(grid.len());
                for p in &grid.points {
                    out.push(other.pointwise(p)?);
                }
                out
            }
        })
    }

    fn pointwise(&self, p: &CurvaturePoint) -> Result<f64> {
        let dim = p.x.len();
        let check = |v: &[f64]| {
            if v.len() == dim {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("vector of length {} on a surface in R^{dim}", v.len())))
            }
        };
        Ok(match self {
            Field::Const(c) => *c,
            Field::PositionDot(v) => {
                check(v)?;
                dot(v, &p.x)
            }
            Field::NormalDot(v) => {
                check(v)?;
                dot(v, &p.normal)
            }
            Field::Rotation(q) => {
                check(&vec![0.0; q.dim()])?;
                dot(&q.apply(&p.x), &p.normal)
            }
            Field::NormSq => p.norm_sq(),
            Field::Support => p.support(),
            Field::MeanCurvature => p.h,
            Field::NormA => p.a_norm2.sqrt(),
            Field::Poly(q) => {
                check(&vec![0.0; q.dim()])?;
                q.eval(&p.x)
            }
            Field::Samples(_) | Field::Sum(..) | Field::Product(..) | Field::Scale(..) => {
                unreachable!("composite fields are evaluated by `values`")
            }
        })
    }

    /// Ambient polynomial agreeing with the field on a round surface.
    pub fn to_poly(&self, m: &RoundModel) -> Option<Poly> {
        let dim = m.n + 1;
        let nrm = |v: &[f64]| -> Vec<f64> { (0..dim).map(|i| if i <= m.k { m.sign * v[i] / m.r } else { 0.0 }).collect() };
        Some(match self {
            Field::Const(c) => Poly::constant(dim, *c),
            Field::PositionDot(v) if v.len() == dim => Poly::linear(v),
            Field::NormalDot(v) if v.len() == dim => Poly::linear(&nrm(v)),
            Field::Rotation(q) if q.dim() == dim => {
                let a = q.matrix();
                let mut p = Poly::zero(dim);
                for i in 0..=m.k {
                    let row: Vec<f64> = a[i * dim..(i + 1) * dim].to_vec();
                    p = p.add(&Poly::coord(dim, i).mul(&Poly::linear(&row)).scale(m.sign / m.r));
                }
                p
            }
            Field::NormSq => Poly::norm_sq(dim, 0..dim),
            Field::Support => Poly::norm_sq(dim, 0..=m.k).scale(m.sign / m.r),
            Field::MeanCurvature => Poly::constant(dim, m.h()),
            Field::NormA => Poly::constant(dim, m.a_norm2().sqrt()),
            Field::Poly(p) if p.dim() == dim => p.clone(),
            Field::Sum(a, b) => a.to_poly(m)?.add(&b.to_poly(m)?),
            Field::Product(a, b) => a.to_poly(m)?.mul(&b.to_poly(m)?),
            Field::Scale(c, a) => a.to_poly(m)?.scale(*c),
            _ => return None,
        })
    }
}

/// Value, tangential gradient (as an ambient vector) and Laplace-Beltrami
/// value of a field at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub val: f64,
    pub grad: Vec<f64>,
    pub lap: f64,
}

/// Jets of `field` at every node, by the path the grid supports.
pub fn jets(grid: &QuadratureGrid, field: &Field) -> Result<Vec<Jet>> {
    if let Some(poly) = grid.round.as_ref().and_then(|m| field.to_poly(m)) {
        return Ok(grid.points.iter().map(|p| poly_jet(&poly, p)).collect());
    }
    let vals = field.values(grid)?;
    match &grid.layout {
        Layout::Cyclic { frame } => {
            let (fs, fss) = frame.arclength_derivatives(&vals);
            Ok((0..vals.len())
                .map(|i| {
                    let t = frame.tangent[i];
                    Jet { val: vals[i], grad: vec![fs[i] * t[0], fs[i] * t[1]], lap: fss[i] }
                })
                .collect())
        }
        Layout::Profile { frame, rho, ring, .. } => {
            let m = rho.len();
            let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            let prof: Vec<f64> = (0..m).map(|i| vals[i * ring]).collect();
            for i in 0..m {
                for j in 0..*ring {
                    if (vals[i * ring + j] - prof[i]).abs() > 1e-10 * scale {
                        return Err(Error::UnsupportedSurface("revolution surfaces support rotation-invariant fields only".into()));
                    }
                }
            }
            let (fs, fss) = frame.arclength_derivatives(&prof);
            let n = grid.dim as f64;
            let mut out = Vec::with_capacity(vals.len());
            for i in 0..m {
                let t = frame.tangent[i];
                let lap = fss[i] + (n - 1.0) * t[0] / rho[i] * fs[i];
                for j in 0..*ring {
                    let x = &grid.points[i * ring + j].x;
                    let last = x.len() - 1;
                    let mut grad: Vec<f64> = x[..last].iter().map(|c| fs[i] * t[0] * c / rho[i]).collect();
                    grad.push(fs[i] * t[1]);
                    out.push(Jet { val: vals[i * ring + j], grad, lap });
                }
            }
            Ok(out)
        }
        Layout::Tensor(_) => Err(Error::UnsupportedSurface("tangential derivatives need a closed-form surface, a curve or a revolution profile".into())),
    }
}

fn poly_jet(poly: &Poly, p: &CurvaturePoint) -> Jet {
    let (val, g, hess) = poly.jet(&p.x);
    let d = g.len();
    let nrm = &p.normal;
    let tr: f64 = (0..d).map(|i| hess[i * d + i]).sum();
    let mut nhn = 0.0;
    for i in 0..d {
        for j in 0..d {
            nhn += nrm[i] * hess[i * d + j] * nrm[j];
        }
    }
    let gn = dot(&g, nrm);
    Jet { val, grad: p.project(&g), lap: tr - nhn - p.h * gn }
}
