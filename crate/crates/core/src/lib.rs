//! Numerical laboratory for the Gaussian surface area of symmetric sets.
//!
//! The crate is organised by task:
//! - [`geometry`]: candidate hypersurfaces, pointwise curvature, quadrature grids;
//! - [`measure`]: Gaussian volumes and perimeters, constraint solving;
//! - [`stability`]: the drift Laplacian and the stability operator, spectra, identity checks;
//! - [`variation`]: first and second variations, quadratic forms and theorem-side functionals;
//! - [`solver`]: lambda-curves by shooting, the cylinder scan, constrained curvature flow.
//!
//! Conventions: the Gaussian weight is `(2 pi)^(-(n+1)/2) exp(-|x|^2/2)` on
//! hypersurfaces of `R^(n+1)`; normals point out of the enclosed solid and
//! the mean curvature is `H = -tr A`, so the sphere of radius `r` has `H = n/r`.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod quadrature;
pub mod roots;
pub mod solver;
pub mod special;
pub mod stability;
pub mod variation;

pub use error::{Error, Result};
