//! Ranking of round cylinders `r S^k x R^(n-k)` at a fixed Gaussian volume.

use crate::error::{Error, Result};
use crate::measure::{gaussian_volume, solve_constraint, Family};
use crate::variation::{theorem_report, ConditionReport};
use serde::Serialize;

/// Grid resolution used for the per-row condition report.
pub const SCAN_RESOLUTION: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub k: usize,
    /// `true` when the enclosed set is the outside of the cylinder.
    pub complement: bool,
    pub label: String,
    pub radius: f64,
    pub volume: f64,
    pub perimeter: f64,
    pub lambda: f64,
    pub report: ConditionReport,
}

fn label(k: usize, n: usize, complement: bool) -> String {
    let base = match k {
        0 => "slab".to_string(),
        _ if k == n => "ball".to_string(),
        _ => format!("cylinder S^{k} x R^{}", n - k),
    };
    if complement {
        format!("complement of {base}")
    } else {
        base
    }
}

/// Every round cylinder in `R^(n+1)` and its complement with Gaussian volume
/// `c`, sorted by Gaussian perimeter.
pub fn cylinder_scan(n: usize, c: f64) -> Result<Vec<ScanRow>> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(2 * (n + 1));
    for k in 0..=n {
        let family = if k == n { Family::Ball { n } } else { Family::Cylinder { k, n } };
        for complement in [false, true] {
            let radius = solve_constraint(&family, c, complement)?;
            let surface = family.member(radius, complement)?;
            let model = surface.round_model().ok_or_else(|| Error::UnsupportedSurface("scan member is not round".into()))?;
            let lambda = model.lambda();
            let report = theorem_report(&surface, &surface.grid(SCAN_RESOLUTION)?, lambda)?;
            rows.push(ScanRow {
                k,
                complement,
                label: label(k, n, complement),
                radius,
                volume: gaussian_volume(&surface)?.value,
                perimeter: model.perimeter(),
                lambda,
                report,
            });
        }
    }
    rows.sort_by(|a, b| a.perimeter.total_cmp(&b.perimeter));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{norm_cdf, norm_pdf};

    #[test]
    fn half_volume_ranking_in_three_space() {
        let rows = cylinder_scan(2, 0.5).unwrap();
        assert_eq!(rows.len(), 6);
        let best_of = |k: usize| rows.iter().find(|r| r.k == k).unwrap().perimeter;
        assert!((best_of(2) - 0.5783).abs() < 5e-5);
        assert!((best_of(1) - 0.5887).abs() < 5e-5);
        assert!((best_of(0) - 0.6356).abs() < 5e-5);
        assert_eq!(rows[0].k, 2);
        assert!(rows.windows(2).all(|w| w[0].perimeter <= w[1].perimeter));
    }

    #[test]
    fn every_row_meets_the_constraint() {
        for n in 1..=4 {
            for r in cylinder_scan(n, 0.5).unwrap() {
                assert!((r.volume - 0.5).abs() < 1e-12, "{} {}", r.label, r.volume);
            }
        }
    }

    #[test]
    fn slab_perimeter_matches_normal_quantiles() {
        // slab {|x_1| < t} with 2 Phi(t) - 1 = c has perimeter 2 phi(t)
        let c = 0.3;
        let rows = cylinder_scan(1, c).unwrap();
        let slab = rows.iter().find(|r| r.k == 0 && !r.complement).unwrap();
        assert!((2.0 * norm_cdf(slab.radius) - 1.0 - c).abs() < 1e-12);
        assert!((slab.perimeter - 2.0 * norm_pdf(slab.radius)).abs() < 1e-14);
        let disc = rows.iter().find(|r| r.k == 1 && !r.complement).unwrap();
        // disc of radius r: volume 1 - e^{-r^2/2}, perimeter r e^{-r^2/2}
        let r = (-2.0 * (1.0 - c).ln()).sqrt();
        assert!((disc.radius - r).abs() < 1e-12);
        assert!((disc.perimeter - r * (1.0 - c)).abs() < 1e-12);
    }

    #[test]
    fn large_volume_prefers_the_slab() {
        let rows = cylinder_scan(2, 0.999).unwrap();
        assert_eq!((rows[0].k, rows[0].complement), (0, false));
        assert!(rows[0].perimeter < 0.02);
    }

    #[test]
    fn rows_carry_condition_reports() {
        for r in cylinder_scan(2, 0.5).unwrap() {
            assert!((r.report.lambda - r.lambda).abs() < 1e-15);
            let cf = r.report.closed_form.unwrap();
            assert!((cf.i1 - r.report.i1).abs() < 1e-8);
        }
    }
}
