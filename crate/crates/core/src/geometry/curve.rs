//! Closed planar curves sampled uniformly in a periodic parameter.
//!
//! Derivatives come from centered periodic finite differences in the sample
//! parameter and are converted to arclength derivatives, so the samples need
//! not be exactly arclength-uniform. Curves are stored counterclockwise, which
//! makes the right-hand normal the exterior one.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Accuracy order of the centered difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum FdOrder {
    Second,
    #[default]
    Fourth,
}

/// First derivative of periodic samples with spacing `h`.
pub fn periodic_d1(f: &[f64], h: f64, order: FdOrder) -> Vec<f64> {
    let n = f.len();
    let at = |i: isize| f[i.rem_euclid(n as isize) as usize];
    (0..n as isize)
        .map(|i| match order {
            FdOrder::Second => (at(i + 1) - at(i - 1)) / (2.0 * h),
            FdOrder::Fourth => (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * h),
        })
        .collect()
}

/// Second derivative of periodic samples with spacing `h`.
pub fn periodic_d2(f: &[f64], h: f64, order: FdOrder) -> Vec<f64> {
    let n = f.len();
    let at = |i: isize| f[i.rem_euclid(n as isize) as usize];
    (0..n as isize)
        .map(|i| match order {
            FdOrder::Second => (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (h * h),
            FdOrder::Fourth => (-at(i + 2) + 16.0 * at(i + 1) - 30.0 * at(i) + 16.0 * at(i - 1) - at(i - 2)) / (12.0 * h * h),
        })
        .collect()
}

/// Trigonometric interpolation of periodic samples onto `m` uniform nodes.
pub fn fourier_resample(f: &[f64], m: usize) -> Vec<f64> {
    let n = f.len();
    if n == m {
        return f.to_vec();
    }
    let half = n / 2;
    let mut coef = Vec::with_capacity(n);
    for k in 0..n {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, &fj) in f.iter().enumerate() {
            let a = -2.0 * PI * ((k * j) % n) as f64 / n as f64;
            re += fj * a.cos();
            im += fj * a.sin();
        }
        coef.push((re / n as f64, im / n as f64));
    }
    (0..m)
        .map(|j| {
            let t = j as f64 / m as f64;
            let mut acc = coef[0].0;
            for (k, &(re, im)) in coef.iter().enumerate().skip(1) {
                // signed frequency; split the Nyquist mode evenly
                let freq = if k < half || (k == half && n % 2 == 1) {
                    k as f64
                } else if k > half {
                    k as f64 - n as f64
                } else {
                    0.0
                };
                if k == half && n.is_multiple_of(2) {
                    acc += re * (2.0 * PI * half as f64 * t).cos();
                    continue;
                }
                let a = 2.0 * PI * freq * t;
                acc += re * a.cos() - im * a.sin();
            }
            acc
        })
        .collect()
}

/// Per-node differential data of a sampled closed curve.
#[derive(Debug, Clone)]
pub struct CurveFrame {
    /// Parameter spacing of the samples.
    pub dsigma: f64,
    /// `|dx/dsigma|` at each node.
    pub speed: Vec<f64>,
    /// `<x', x''> / |x'|^2`, needed to convert second parameter derivatives.
    pub speed_ratio: Vec<f64>,
    pub tangent: Vec<[f64; 2]>,
    pub normal: Vec<[f64; 2]>,
    /// Signed curvature, positive for a counterclockwise convex curve.
    pub curvature: Vec<f64>,
    pub order: FdOrder,
}

impl CurveFrame {
    pub fn compute(points: &[[f64; 2]], dsigma: f64, order: FdOrder) -> Self {
        let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = points.iter().map(|p| p[1]).collect();
        let (x1, y1) = (periodic_d1(&xs, dsigma, order), periodic_d1(&ys, dsigma, order));
        let (x2, y2) = (periodic_d2(&xs, dsigma, order), periodic_d2(&ys, dsigma, order));
        let n = points.len();
        let mut frame = CurveFrame {
            dsigma,
            speed: Vec::with_capacity(n),
            speed_ratio: Vec::with_capacity(n),
            tangent: Vec::with_capacity(n),
            normal: Vec::with_capacity(n),
            curvature: Vec::with_capacity(n),
            order,
        };
        for i in 0..n {
            let v = x1[i].hypot(y1[i]);
            let t = [x1[i] / v, y1[i] / v];
            frame.speed.push(v);
            frame.speed_ratio.push((x1[i] * x2[i] + y1[i] * y2[i]) / (v * v));
            frame.tangent.push(t);
            frame.normal.push([t[1], -t[0]]);
            frame.curvature.push((x1[i] * y2[i] - y1[i] * x2[i]) / (v * v * v));
        }
        frame
    }

    /// Arclength derivatives `(f_s, f_ss)` of nodal values.
    pub fn arclength_derivatives(&self, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d1 = periodic_d1(f, self.dsigma, self.order);
        let d2 = periodic_d2(f, self.dsigma, self.order);
        let fs = d1.iter().zip(&self.speed).map(|(a, v)| a / v).collect();
        let fss = (0..f.len()).map(|i| (d2[i] - d1[i] * self.speed_ratio[i]) / (self.speed[i] * self.speed[i])).collect();
        (fs, fss)
    }

    /// Arclength element at each node.
    pub fn ds(&self) -> Vec<f64> {
        self.speed.iter().map(|v| v * self.dsigma).collect()
    }
}

/// A closed curve in the plane given by uniform samples of a periodic parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCurve {
    points: Vec<[f64; 2]>,
    symmetric: bool,
}

impl PlanarCurve {
    /// Builds a curve from a closed polyline whose last point repeats the first.
    pub fn from_closed_polyline(mut pts: Vec<[f64; 2]>, symmetric: bool) -> Result<Self> {
        if pts.len() < 4 {
            return Err(Error::ResolutionTooLow(pts.len()));
        }
        let first = pts[0];
        let last = *pts.last().unwrap();
        let scale: f64 = pts.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum();
        let gap = (last[0] - first[0]).hypot(last[1] - first[1]);
        if gap > 1e-9 * scale.max(1.0) {
            return Err(Error::OpenCurve(gap));
        }
        pts.pop();
        Self::from_periodic_samples(pts, symmetric)
    }

    /// Builds a curve from samples of a periodic parametrization (no repeated
    /// endpoint). Clockwise input is reversed.
    pub fn from_periodic_samples(mut pts: Vec<[f64; 2]>, symmetric: bool) -> Result<Self> {
        if pts.len() < 8 {
            return Err(Error::ResolutionTooLow(pts.len()));
        }
        if pts.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidParameter("non-finite curve sample".into()));
        }
        if signed_area(&pts) < 0.0 {
            pts.reverse();
            // keep node 0 fixed so antipodal pairing i <-> i + n/2 survives
            pts.rotate_right(1);
        }
        let curve = Self { points: pts, symmetric };
        if symmetric {
            let d = curve.symmetry_defect();
            if d > 1e-8 * curve.diameter().max(1.0) {
                return Err(Error::InvalidParameter(format!("curve flagged symmetric but x -> -x defect is {d:.3e}")));
            }
        }
        Ok(curve)
    }

    /// Samples a parametric curve `t -> p(t)`, `t` in `[0, 2 pi)`, on `m` nodes.
    pub fn from_parametric(p: impl Fn(f64) -> [f64; 2], m: usize, symmetric: bool) -> Result<Self> {
        let pts = (0..m).map(|j| p(2.0 * PI * j as f64 / m as f64)).collect();
        Self::from_periodic_samples(pts, symmetric)
    }

    pub fn circle(r: f64, m: usize) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        Self::from_parametric(|t| [r * t.cos(), r * t.sin()], m, m.is_multiple_of(2))
    }

    pub fn ellipse(a: f64, b: f64, m: usize) -> Result<Self> {
        if !(a > 0.0) || !(b > 0.0) {
            return Err(Error::NonPositiveRadius(a.min(b)));
        }
        Self::from_parametric(|t| [a * t.cos(), b * t.sin()], m, m.is_multiple_of(2))
    }

    /// Polar graph `r(theta) = base + amp cos(freq theta)`.
    pub fn polar_wave(base: f64, amp: f64, freq: u32, m: usize) -> Result<Self> {
        if !(base > amp.abs()) {
            return Err(Error::NonPositiveRadius(base - amp.abs()));
        }
        let symmetric = freq.is_multiple_of(2) && m.is_multiple_of(2);
        Self::from_parametric(
            |t| {
                let r = base + amp * (freq as f64 * t).cos();
                [r * t.cos(), r * t.sin()]
            },
            m,
            symmetric,
        )
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn dsigma(&self) -> f64 {
        2.0 * PI / self.points.len() as f64
    }

    pub fn frame(&self, order: FdOrder) -> CurveFrame {
        CurveFrame::compute(&self.points, self.dsigma(), order)
    }

    fn speed_series(&self) -> RealSeries {
        let z = ComplexSeries::from_samples(&self.points);
        let n = self.len();
        let speed: Vec<f64> = (0..n).map(|j| z.derivative_abs(2.0 * PI * j as f64 / n as f64)).collect();
        RealSeries::from_samples(&speed)
    }

    /// Euclidean length of the trigonometric interpolant.
    pub fn length(&self) -> f64 {
        self.speed_series().mean() * 2.0 * PI
    }

    /// Cumulative arclength at each node, starting from 0.
    pub fn arclength(&self) -> Vec<f64> {
        let s = self.speed_series();
        (0..self.len()).map(|j| s.integral(2.0 * PI * j as f64 / self.len() as f64)).collect()
    }

    /// Position, unit tangent, exterior normal and curvature of the
    /// trigonometric interpolant at parameter `sigma`.
    pub fn interpolate(&self, sigma: f64) -> ([f64; 2], [f64; 2], [f64; 2], f64) {
        let [p, d1, d2] = ComplexSeries::from_samples(&self.points).jet(sigma);
        let v = d1[0].hypot(d1[1]);
        let t = [d1[0] / v, d1[1] / v];
        let kappa = (d1[0] * d2[1] - d1[1] * d2[0]) / (v * v * v);
        (p, t, [t[1], -t[0]], kappa)
    }

    /// `int w(x) ds` over the curve, with the speed taken from the
    /// trigonometric interpolant (spectrally accurate for smooth curves).
    pub fn weighted_length(&self, w: impl Fn([f64; 2]) -> f64) -> f64 {
        let z = ComplexSeries::from_samples(&self.points);
        let n = self.len();
        let ds = self.dsigma();
        (0..n).map(|j| w(self.points[j]) * z.derivative_abs(j as f64 * ds) * ds).sum()
    }

    /// The curve dilated by `s > 0` about the origin.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::NonPositiveRadius(s));
        }
        Ok(Self { points: self.points.iter().map(|p| [s * p[0], s * p[1]]).collect(), symmetric: self.symmetric })
    }

    /// Resamples onto `m` nodes by trigonometric interpolation.
    pub fn resample(&self, m: usize) -> Result<Self> {
        let xs: Vec<f64> = self.points.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = self.points.iter().map(|p| p[1]).collect();
        let (xr, yr) = (fourier_resample(&xs, m), fourier_resample(&ys, m));
        let pts = xr.into_iter().zip(yr).map(|(x, y)| [x, y]).collect();
        Self::from_periodic_samples(pts, self.symmetric && m.is_multiple_of(2))
    }

    /// Reparametrizes to uniform arclength on `m` nodes using the trigonometric
    /// interpolant of the samples and a spectrally integrated arclength.
    pub fn reparametrize_by_arclength(&self, m: usize) -> Result<Self> {
        let z = ComplexSeries::from_samples(&self.points);
        let n = self.len();
        let speed: Vec<f64> = (0..n).map(|j| z.derivative_abs(2.0 * PI * j as f64 / n as f64)).collect();
        let s_series = RealSeries::from_samples(&speed);
        let total = s_series.mean() * 2.0 * PI;
        let mut pts = Vec::with_capacity(m);
        for j in 0..m {
            let target = total * j as f64 / m as f64;
            let mut sigma = 2.0 * PI * j as f64 / m as f64;
            for _ in 0..50 {
                let step = (s_series.integral(sigma) - target) / z.derivative_abs(sigma);
                sigma -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            pts.push(z.eval(sigma));
        }
        Self::from_periodic_samples(pts, self.symmetric && m.is_multiple_of(2))
    }

    /// `max_i |x_i + x_{i + n/2}|`; zero for a centrally symmetric parametrization.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.len();
        if n % 2 == 1 {
            return f64::INFINITY;
        }
        (0..n / 2)
            .map(|i| {
                let (a, b) = (self.points[i], self.points[i + n / 2]);
                (a[0] + b[0]).hypot(a[1] + b[1])
            })
            .fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        self.points.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max) * 2.0
    }

    /// Enforces exact central symmetry by averaging antipodal samples.
    pub fn symmetrized(&self) -> Result<Self> {
        let n = self.len();
        if n % 2 == 1 {
            return Err(Error::InvalidParameter("odd node count cannot pair antipodes".into()));
        }
        let mut pts = self.points.clone();
        for i in 0..n / 2 {
            let (a, b) = (self.points[i], self.points[i + n / 2]);
            let m = [0.5 * (a[0] - b[0]), 0.5 * (a[1] - b[1])];
            pts[i] = m;
            pts[i + n / 2] = [-m[0], -m[1]];
        }
        Self::from_periodic_samples(pts, true)
    }

    /// Cumulative arclength and positions, closed by repeating the first node.
    pub fn to_rows(&self) -> Vec<[f64; 3]> {
        let s = self.arclength();
        let total = self.length();
        let mut rows: Vec<[f64; 3]> = s.iter().zip(&self.points).map(|(s, p)| [*s, p[0], p[1]]).collect();
        rows.push([total, self.points[0][0], self.points[0][1]]);
        rows
    }
}

fn signed_freq(k: usize, n: usize) -> f64 {
    if 2 * k < n {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Trigonometric interpolant of a periodic complex signal `x + i y`.
struct ComplexSeries {
    n: usize,
    coef: Vec<(f64, f64)>,
}

impl ComplexSeries {
    fn from_samples(pts: &[[f64; 2]]) -> Self {
        let n = pts.len();
        let coef = (0..n)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (j, p) in pts.iter().enumerate() {
                    let a = -2.0 * PI * ((k * j) % n) as f64 / n as f64;
                    let (c, s) = (a.cos(), a.sin());
                    re += p[0] * c - p[1] * s;
                    im += p[0] * s + p[1] * c;
                }
                (re / n as f64, im / n as f64)
            })
            .collect();
        Self { n, coef }
    }

    fn eval(&self, sigma: f64) -> [f64; 2] {
        let mut acc = [0.0, 0.0];
        for (k, &(re, im)) in self.coef.iter().enumerate() {
            if 2 * k == self.n {
                // Nyquist mode is kept as a cosine so the interpolant stays real on the nodes
                let c = (0.5 * self.n as f64 * sigma).cos();
                acc[0] += re * c;
                acc[1] += im * c;
                continue;
            }
            let a = signed_freq(k, self.n) * sigma;
            let (c, s) = (a.cos(), a.sin());
            acc[0] += re * c - im * s;
            acc[1] += re * s + im * c;
        }
        acc
    }

    /// Value, first and second derivative of the interpolant at `sigma`.
    fn jet(&self, sigma: f64) -> [[f64; 2]; 3] {
        let mut out = [[0.0; 2]; 3];
        for (k, &(re, im)) in self.coef.iter().enumerate() {
            if 2 * k == self.n {
                let h = 0.5 * self.n as f64;
                let c = (h * sigma).cos();
                out[0][0] += re * c;
                out[0][1] += im * c;
                continue;
            }
            let f = signed_freq(k, self.n);
            let a = f * sigma;
            let (c, s) = (a.cos(), a.sin());
            let (vr, vi) = (re * c - im * s, re * s + im * c);
            out[0][0] += vr;
            out[0][1] += vi;
            out[1][0] -= f * vi;
            out[1][1] += f * vr;
            out[2][0] -= f * f * vr;
            out[2][1] -= f * f * vi;
        }
        out
    }

    fn derivative_abs(&self, sigma: f64) -> f64 {
        let mut acc = [0.0, 0.0];
        for (k, &(re, im)) in self.coef.iter().enumerate() {
            if 2 * k == self.n {
                continue;
            }
            let f = signed_freq(k, self.n);
            let a = f * sigma;
            let (c, s) = (a.cos(), a.sin());
            // d/dsigma of (re + i im) e^{i f sigma} = i f (re + i im) e^{i f sigma}
            acc[0] += -f * (re * s + im * c);
            acc[1] += f * (re * c - im * s);
        }
        acc[0].hypot(acc[1])
    }
}

/// Trigonometric interpolant of a real periodic signal with exact antiderivative.
struct RealSeries {
    n: usize,
    coef: Vec<(f64, f64)>,
}

impl RealSeries {
    fn from_samples(v: &[f64]) -> Self {
        let pts: Vec<[f64; 2]> = v.iter().map(|&x| [x, 0.0]).collect();
        let c = ComplexSeries::from_samples(&pts);
        Self { n: c.n, coef: c.coef }
    }

    fn mean(&self) -> f64 {
        self.coef[0].0
    }

    /// `int_0^sigma f`.
    fn integral(&self, sigma: f64) -> f64 {
        let mut acc = self.coef[0].0 * sigma;
        for (k, &(re, im)) in self.coef.iter().enumerate().skip(1) {
            if 2 * k == self.n {
                let h = 0.5 * self.n as f64;
                acc += re * (h * sigma).sin() / h;
                continue;
            }
            let f = signed_freq(k, self.n);
            // Re[ c (e^{i f s} - 1) / (i f) ]
            let a = f * sigma;
            let (c, s) = (a.cos() - 1.0, a.sin());
            acc += (re * s + im * c) / f;
        }
        acc
    }
}

/// Shoelace signed area of a closed polygon.
pub fn signed_area(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_curvature_converges_at_second_order() {
        let r = 1.7;
        let err = |m: usize| {
            let c = PlanarCurve::circle(r, m).unwrap();
            let f = c.frame(FdOrder::Second);
            f.curvature.iter().map(|k| (k - 1.0 / r).abs()).fold(0.0, f64::max)
        };
        let (e1, e2, e3) = (err(64), err(128), err(256));
        let (r1, r2) = (e1 / e2, e2 / e3);
        assert!((r1 - 4.0).abs() < 0.05 && (r2 - 4.0).abs() < 0.05, "ratios {r1} {r2}");
    }

    #[test]
    fn fourth_order_stencils_on_ellipse() {
        let (a, b) = (2.0, 1.0);
        let exact = |t: f64| a * b / (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).powf(1.5);
        let err = |m: usize| {
            let c = PlanarCurve::ellipse(a, b, m).unwrap();
            let f = c.frame(FdOrder::Fourth);
            (0..m).map(|j| (f.curvature[j] - exact(2.0 * PI * j as f64 / m as f64)).abs()).fold(0.0, f64::max)
        };
        let ratio = err(128) / err(256);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let pts: Vec<[f64; 2]> = (0..16)
            .map(|j| {
                let t = -2.0 * PI * j as f64 / 16.0;
                [t.cos(), t.sin()]
            })
            .collect();
        let c = PlanarCurve::from_periodic_samples(pts, true).unwrap();
        assert!(signed_area(c.points()) > 0.0);
        assert!(c.symmetry_defect() < 1e-14);
        let f = c.frame(FdOrder::Fourth);
        // exterior normal points away from the origin
        assert!(f.normal.iter().zip(c.points()).all(|(n, p)| n[0] * p[0] + n[1] * p[1] > 0.0));
    }

    #[test]
    fn open_polyline_is_rejected() {
        let pts: Vec<[f64; 2]> = (0..10).map(|j| [j as f64, 0.0]).collect();
        assert!(matches!(PlanarCurve::from_closed_polyline(pts, false), Err(Error::OpenCurve(_))));
    }

    #[test]
    fn fourier_resampling_is_exact_for_band_limited_data() {
        let f: Vec<f64> = (0..24).map(|j| (3.0 * 2.0 * PI * j as f64 / 24.0).cos() + 0.5).collect();
        let g = fourier_resample(&f, 60);
        for (j, v) in g.iter().enumerate() {
            let t = 2.0 * PI * j as f64 / 60.0;
            assert!((v - ((3.0 * t).cos() + 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn arclength_reparametrization_evens_out_speed() {
        let c = PlanarCurve::ellipse(3.0, 1.0, 256).unwrap();
        let u = c.reparametrize_by_arclength(256).unwrap();
        let f = u.frame(FdOrder::Fourth);
        let (lo, hi) = f.speed.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!((hi - lo) / hi < 1e-3, "speed spread {lo} {hi}");
        assert!((u.length() - c.length()).abs() < 1e-8);
    }

    #[test]
    fn closed_rows_round_trip() {
        let c = PlanarCurve::polar_wave(1.0, 0.3, 6, 128).unwrap();
        let rows = c.to_rows();
        let pts: Vec<[f64; 2]> = rows.iter().map(|r| [r[1], r[2]]).collect();
        let back = PlanarCurve::from_closed_polyline(pts, true).unwrap();
        assert_eq!(back.points(), c.points());
    }
}
