//! Bracketing root finder for monotone scalar problems.
//!
//! Bisection steps guarantee progress; once the bracket has shrunk by half in a
//! single step the method switches to secant (regula falsi with the Illinois
//! modification) and falls back to bisection whenever the secant estimate
//! leaves the bracket or stalls.

use crate::error::{Error, Result};

pub const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub xtol: f64,
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { xtol: 1e-15, ftol: 0.0, max_iter: MAX_ITER }
    }
}

/// Finds `x` in `[a, b]` with `f(x) = 0`, given a sign change at the ends.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: RootOptions) -> Result<f64> {
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::NoBracket(lo, hi));
    }
    let mut use_secant = false;
    let mut last_side = 0i8;
    for _ in 0..opts.max_iter {
        let width = hi - lo;
        if width <= opts.xtol * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let mut x = 0.5 * (lo + hi);
        if use_secant {
            let s = hi - fhi * (hi - lo) / (fhi - flo);
            if s.is_finite() && s > lo && s < hi {
                x = s;
            }
        }
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::ConvergenceFailure(format!("non-finite function value at {x}")));
        }
        if fx == 0.0 || fx.abs() <= opts.ftol {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if last_side == -1 {
                fhi *= 0.5;
            }
            last_side = -1;
        } else {
            hi = x;
            fhi = fx;
            if last_side == 1 {
                flo *= 0.5;
            }
            last_side = 1;
        }
        use_secant = (hi - lo) < 0.5 * width;
    }
    Ok(if flo.abs() < fhi.abs() { lo } else { hi })
}

/// Expands `[a, b]` geometrically upward until `f` changes sign, then solves.
/// Intended for monotone functions on a half-line starting at `a`.
pub fn find_root_expanding<F: FnMut(f64) -> f64>(mut f: F, a: f64, mut b: f64, limit: f64) -> Result<f64> {
    let fa = f(a);
    let mut fb = f(b);
    while fa.signum() == fb.signum() {
        if b >= limit {
            return Err(Error::NoBracket(a, b));
        }
        b = (2.0 * b).min(limit);
        fb = f(b);
    }
    find_root(f, a, b, RootOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_cubic() {
        let r = find_root(|x| x * x * x - 2.0, 0.0, 2.0, RootOptions::default()).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_missing_sign_change() {
        let e = find_root(|x| x * x + 1.0, -1.0, 1.0, RootOptions::default());
        assert!(matches!(e, Err(Error::NoBracket(..))));
    }

    #[test]
    fn expanding_bracket_reaches_root() {
        let r = find_root_expanding(|x| x - 37.5, 0.0, 1.0, 1e6).unwrap();
        assert!((r - 37.5).abs() < 1e-12);
    }

    #[test]
    fn handles_flat_tail() {
        // steep near the root, flat elsewhere
        let r = find_root(|x| (x - 0.3).tanh().powi(3), -10.0, 10.0, RootOptions::default()).unwrap();
        assert!((r - 0.3).abs() < 1e-8);
    }
}
