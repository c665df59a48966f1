//! Adaptive Dormand-Prince 5(4) integration with the fourth-order continuous
//! extension for dense output.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; chosen from the tolerances when zero.
    pub initial_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, initial_step: 0.0, max_step: f64::INFINITY, max_steps: 1_000_000 }
    }
}

/// One accepted step with its interpolation coefficients.
#[derive(Debug, Clone, PartialEq)]
struct Segment {
    t0: f64,
    h: f64,
    /// Five coefficient vectors of the continuous extension.
    rcont: [Vec<f64>; 5],
}

impl Segment {
    fn eval(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        (0..r1.len()).map(|i| r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])))).collect()
    }
}

/// A trajectory with dense output on `[t_start, t_end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    segments: Vec<Segment>,
    pub t_start: f64,
    pub t_end: f64,
    pub y_end: Vec<f64>,
    pub steps: usize,
    pub rejected: usize,
}

impl Solution {
    /// State at `t`, clamped to the integration interval.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let t = t.clamp(self.t_start, self.t_end);
        let i = self.segments.partition_point(|s| s.t0 + s.h < t).min(self.segments.len() - 1);
        self.segments[i].eval(t)
    }

    /// Step endpoints, starting with `t_start`.
    pub fn mesh(&self) -> Vec<f64> {
        std::iter::once(self.t_start).chain(self.segments.iter().map(|s| s.t0 + s.h)).collect()
    }

    /// First `t` where `g(y(t))` changes sign from its initial sign, refined
    /// by bisection on the dense output.
    pub fn first_root(&self, g: impl Fn(&[f64]) -> f64) -> Option<f64> {
        let mut prev_t = self.t_start;
        let mut prev = g(&self.eval(prev_t));
        for s in &self.segments {
            // a few interior probes catch sign changes that return within one step
            for j in 1..=4 {
                let t = s.t0 + s.h * j as f64 / 4.0;
                let v = g(&s.eval(t));
                if prev == 0.0 {
                    return Some(prev_t);
                }
                if v.signum() != prev.signum() {
                    let (mut a, mut b, mut fa) = (prev_t, t, prev);
                    for _ in 0..200 {
                        let m = 0.5 * (a + b);
                        if m <= a || m >= b {
                            break;
                        }
                        let fm = g(&s.eval(m));
                        if fm.signum() == fa.signum() {
                            (a, fa) = (m, fm);
                        } else {
                            b = m;
                        }
                    }
                    return Some(0.5 * (a + b));
                }
                (prev_t, prev) = (t, v);
            }
        }
        None
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn combo(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        if *c != 0.0 {
            out.iter_mut().zip(k.iter()).for_each(|(o, v)| *o += h * c * v);
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`.
pub fn integrate(f: impl Fn(f64, &[f64], &mut [f64]), t0: f64, y0: &[f64], t1: f64, opts: OdeOptions) -> Result<Solution> {
    if !(t1 > t0) {
        return Err(Error::InvalidParameter(format!("integration interval [{t0}, {t1}] is empty")));
    }
    if !(opts.rtol > 0.0 && opts.atol >= 0.0) {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }
    let n = y0.len();
    let eval = |t: f64, y: &[f64]| {
        let mut d = vec![0.0; n];
        f(t, y, &mut d);
        d
    };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = eval(t, &y);
    let span = t1 - t0;
    let mut h = if opts.initial_step > 0.0 { opts.initial_step } else { (span * opts.rtol.powf(0.2) * 0.1).min(span) };
    h = h.min(opts.max_step);
    let mut segments = Vec::new();
    let mut rejected = 0;
    let mut err_prev: f64 = 1e-4;
    while t < t1 {
        if segments.len() + rejected >= opts.max_steps {
            return Err(Error::ConvergenceFailure(format!("step budget {} exhausted at t = {t}", opts.max_steps)));
        }
        if h < 1e-14 * t.abs().max(span) {
            return Err(Error::StepUnderflow(t));
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let k2 = eval(t + C2 * h, &combo(&y, h, &[(A21, &k1)]));
        let k3 = eval(t + C3 * h, &combo(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = eval(t + C4 * h, &combo(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = eval(t + C5 * h, &combo(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = eval(t + h, &combo(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y1 = combo(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = eval(t + h, &y1);
        let mut err = 0.0;
        for i in 0..n {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / n.max(1) as f64).sqrt();
        if !err.is_finite() {
            h *= 0.1;
            rejected += 1;
            continue;
        }
        if err <= 1.0 {
            // step-size control with a mild PI correction
            let fac = (0.9 * err.max(1e-10).powf(-0.17) * err_prev.powf(0.04)).clamp(0.2, 10.0);
            let r2: Vec<f64> = (0..n).map(|i| y1[i] - y[i]).collect();
            let r3: Vec<f64> = (0..n).map(|i| h * k1[i] - r2[i]).collect();
            let r4: Vec<f64> = (0..n).map(|i| r2[i] - h * k7[i] - r3[i]).collect();
            let r5: Vec<f64> = (0..n).map(|i| h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])).collect();
            segments.push(Segment { t0: t, h, rcont: [y.clone(), r2, r3, r4, r5] });
            t = if last { t1 } else { t + h };
            y = y1;
            k1 = k7;
            err_prev = err.max(1e-4);
            h = (h * fac).min(opts.max_step);
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            rejected += 1;
        }
    }
    Ok(Solution { steps: segments.len(), segments, t_start: t0, t_end: t1, y_end: y, rejected })
}
