//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use gsa_core::geometry::poly::Poly;
use gsa_core::geometry::{make_surface, AntisymmetricGenerator, PlanarCurve, Surface, SurfaceSpec};
use gsa_core::measure::profile_table;
use gsa_core::solver::{cylinder_scan, find_closed_curve, mcf_minimize, shoot_curve, ClosedCurveOptions, FlowOptions, FlowShape, FlowStatus, OdeOptions};
use gsa_core::stability::field::Field;
use gsa_core::stability::identity::{check_identity, IdentityId};
use gsa_core::stability::spectrum::profile_spectrum;
use gsa_core::variation::{
    dilation_balance, dilation_balance_closed_form, fd_variation_check, mean_inner_product, nodal_domains, random_bilinear, VariationInput,
};
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn surface(spec: SurfaceSpec) -> Surface {
    make_surface(spec).expect("valid surface")
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn numeric_table() -> Outcome {
    let (rows, dt) = timed(|| profile_table(&[1, 2, 3], 0.5));
    let rows = rows.map_err(|e| e.to_string())?;
    for (row, want) in rows.iter().zip([0.6356, 0.5887, 0.5783]) {
        ensure((row.perimeter - want).abs() <= 5e-4, format!("dimension {}: {} vs {want}", row.n, row.perimeter))?;
    }
    ensure(dt < Duration::from_secs(1), format!("took {dt:?}"))?;
    Ok(format!("{:.4} {:.4} {:.4} in {dt:?}", rows[0].perimeter, rows[1].perimeter, rows[2].perimeter))
}

fn high_dimensional_limit() -> Outcome {
    let (rows, dt) = timed(|| profile_table(&[25, 100, 400], 0.5));
    let rows = rows.map_err(|e| e.to_string())?;
    let limit = 1.0 / PI.sqrt();
    for w in rows.windows(2) {
        ensure(w[1].perimeter < w[0].perimeter, "areas not decreasing")?;
    }
    for r in &rows {
        ensure((r.perimeter - limit).abs() <= 1.5 / (r.n as f64).sqrt(), format!("n={} area {}", r.n, r.perimeter))?;
    }
    ensure(dt < Duration::from_secs(5), format!("took {dt:?}"))?;
    Ok(rows.iter().map(|r| format!("n={}: {:.5}", r.n, r.perimeter)).collect::<Vec<_>>().join(", "))
}

fn circle_spectrum(r: f64, m: usize, count: usize) -> Result<Vec<f64>, String> {
    let s = surface(SurfaceSpec::Curve { curve: PlanarCurve::circle(r, m).map_err(|e| e.to_string())? });
    let g = s.grid(m).map_err(|e| e.to_string())?;
    Ok(profile_spectrum(&s, &g, count).map_err(|e| e.to_string())?.eigenvalues)
}

fn sphere_spectrum() -> Outcome {
    let exact: Vec<f64> = [0usize, 1, 1, 2, 2, 3, 3, 4, 4].iter().map(|&l| 1.0 + (1.0 - (l * l) as f64)).collect();
    let err = |m: usize| -> Result<f64, String> {
        let ev = circle_spectrum(1.0, m, 9)?;
        Ok(ev.iter().zip(&exact).fold(0.0f64, |a, (x, e)| a.max((x - e).abs() / e.abs())))
    };
    let (e1, e2) = (err(512)?, err(1024)?);
    ensure(e2 <= 1e-3, format!("relative error {e2:.2e} at 1024 nodes"))?;
    let ratio = e1 / e2;
    ensure((3.5..4.5).contains(&ratio), format!("doubling ratio {ratio:.3}"))?;
    // n = 1: degree 2 crosses zero at r = sqrt(3)
    let ev = circle_spectrum(3f64.sqrt(), 1024, 5)?;
    ensure(ev[3].abs() < 1e-4 && ev[4].abs() < 1e-4, format!("degree-2 eigenvalues {:.2e} {:.2e}", ev[3], ev[4]))?;
    Ok(format!("rel err {e2:.2e}, doubling ratio {ratio:.2}, degree-2 at r=sqrt3: {:.1e}", ev[3].abs().max(ev[4].abs())))
}

fn identity_suite() -> Outcome {
    let closed = [
        (SurfaceSpec::Sphere { r: 1.5, n: 2 }, 256),
        (SurfaceSpec::Sphere { r: 2.0, n: 1 }, 256),
        (SurfaceSpec::Sphere { r: 1.2, n: 3 }, 256),
        (SurfaceSpec::Cylinder { r: 1.0, k: 1, n: 2 }, 256),
        (SurfaceSpec::Cylinder { r: 1.7, k: 2, n: 3 }, 256),
    ];
    let mut worst_closed = 0.0f64;
    for (spec, res) in closed {
        let s = surface(spec);
        let g = s.grid(res).map_err(|e| e.to_string())?;
        let lambda = s.round_model().expect("round").lambda();
        for id in IdentityId::ALL {
            let rep = check_identity(&s, lambda, id, &g).map_err(|e| format!("{id} on {:?}: {e}", s.spec()))?;
            ensure(rep.max_residual < 1e-6, format!("{id} on {:?}: {:.2e}", s.spec(), rep.max_residual))?;
            worst_closed = worst_closed.max(rep.max_residual);
        }
    }
    let c = find_closed_curve((-3.0, -0.1), 3, ClosedCurveOptions::default()).map_err(|e| e.to_string())?;
    let s = surface(SurfaceSpec::Curve { curve: c.curve.clone() });
    let g = s.grid(2048).map_err(|e| e.to_string())?;
    let mut worst_curve = 0.0f64;
    for id in IdentityId::ALL {
        let rep = check_identity(&s, c.lambda, id, &g).map_err(|e| format!("{id} on the 3-fold curve: {e}"))?;
        ensure(rep.max_residual < 1e-4, format!("{id} on the 3-fold curve: {:.2e}", rep.max_residual))?;
        worst_curve = worst_curve.max(rep.max_residual);
    }
    Ok(format!("worst residual {worst_closed:.1e} on round surfaces, {worst_curve:.1e} on the 3-fold curve at {} nodes", g.points.len()))
}

fn monte_carlo_inner_products() -> Outcome {
    let s2 = 0.5f64.sqrt();
    let triples: [(Vec<f64>, Vec<f64>, usize); 5] = [
        (vec![1.0, 0.0], vec![1.0, 0.0], 1),
        (vec![1.0, 0.0, 0.0], vec![s2, s2, 0.0], 2),
        (vec![0.6, 0.8, 0.0], vec![0.8, -0.6, 0.0], 2),
        (vec![0.5, 0.5, 0.5, 0.5], vec![1.0, 0.0, 0.0, 0.0], 3),
        (vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, 0.0, 0.6, 0.8], 5),
    ];
    let mut worst = 0.0f64;
    for (i, (a, b, n)) in triples.iter().enumerate() {
        let est = mean_inner_product(a, b, *n, 1_000_000, 7 + i as u64).map_err(|e| e.to_string())?;
        ensure(est.z_score().abs() <= 3.0, format!("triple {i}: z = {:.2}", est.z_score()))?;
        worst = worst.max(est.z_score().abs());
    }
    let (a, b, n) = &triples[1];
    let x = mean_inner_product(a, b, *n, 1_000_000, 99).map_err(|e| e.to_string())?;
    let y = mean_inner_product(a, b, *n, 1_000_000, 99).map_err(|e| e.to_string())?;
    ensure(x == y, "estimates differ under a fixed seed")?;
    Ok(format!("max |z| = {worst:.2}, repeat run identical"))
}

fn random_bilinear_chain() -> Outcome {
    let n = 2;
    let sharp = ((n + 2) as f64).sqrt();
    let mut notes = vec![];
    for r in [1.5, sharp, 3.0] {
        let s = surface(SurfaceSpec::Sphere { r, n });
        let g = s.grid(512).map_err(|e| e.to_string())?;
        let lambda = n as f64 / r - r;
        let rep = random_bilinear(&s, &g, lambda, 4000, 11).map_err(|e| e.to_string())?;
        ensure(rep.chain_holds(3.0), format!("r={r}: max {} mean {} analytic {} bound {}", rep.max, rep.mean, rep.analytic, rep.bound))?;
        if r == sharp {
            ensure(rep.analytic.abs() <= 1e-6, format!("analytic average {} at r = sqrt(n+2)", rep.analytic))?;
        }
        notes.push(format!("r={r:.3}: analytic {:.2e}", rep.analytic));
    }
    Ok(notes.join(", "))
}

fn fd_cross_check() -> Outcome {
    let d3 = |i: usize, j: usize| Poly::coord(3, i).mul(&Poly::coord(3, j));
    let cases: Vec<(&str, SurfaceSpec, usize, VariationInput)> = vec![
        (
            "circle cos 2t",
            SurfaceSpec::Curve { curve: PlanarCurve::circle(1.0, 2048).unwrap() },
            2048,
            VariationInput::new(Field::Poly(Poly::coord(2, 0).mul(&Poly::coord(2, 0)).add(&Poly::coord(2, 1).mul(&Poly::coord(2, 1)).scale(-1.0)))),
        ),
        ("sphere constant", SurfaceSpec::Sphere { r: 1.3, n: 2 }, 256, VariationInput::new(Field::Const(0.7))),
        (
            "sphere harmonic, dilated",
            SurfaceSpec::Sphere { r: 2.0, n: 2 },
            1024,
            VariationInput::new(Field::Poly(d3(0, 2).scale(0.25))).with_dilation(0.3, -0.2),
        ),
        (
            "ellipse |x|^2, dilated",
            SurfaceSpec::Curve { curve: PlanarCurve::ellipse(2.0, 1.0, 2048).unwrap() },
            2048,
            VariationInput::new(Field::scale(0.1, Field::NormSq)).with_dilation(0.1, 0.05),
        ),
        ("cylinder x1^2 - x2^2", SurfaceSpec::Cylinder { r: 1.5, k: 1, n: 2 }, 512, VariationInput::new(Field::Poly(d3(0, 0).add(&d3(1, 1).scale(-1.0))))),
        (
            "wavy curve constant, dilated",
            SurfaceSpec::Curve { curve: PlanarCurve::polar_wave(1.2, 0.1, 4, 2048).unwrap() },
            2048,
            VariationInput::new(Field::Const(0.3)).with_dilation(0.2, 0.0),
        ),
    ];
    let mut worst = 0.0f64;
    for (name, spec, res, input) in cases {
        let s = surface(spec);
        let g = s.grid(res).map_err(|e| e.to_string())?;
        let rep = fd_variation_check(&s, &g, &input, &[1e-3, 5e-4]).map_err(|e| format!("{name}: {e}"))?;
        let e = rep.best_relative_error();
        ensure(e < 1e-4, format!("{name}: relative error {e:.2e}"))?;
        worst = worst.max(e);
    }
    Ok(format!("6 cases, worst relative error {worst:.2e}"))
}

fn dilation_balance_criterion() -> Outcome {
    let mut worst = 0.0f64;
    for (r, n) in [(1.0, 1), (1.5, 2), (2.5, 2), (1.2, 3)] {
        let s = surface(SurfaceSpec::Sphere { r, n });
        let g = s.grid(512).map_err(|e| e.to_string())?;
        let v = dilation_balance(&s, &g).map_err(|e| e.to_string())?;
        ensure(v.abs() < 1e-8, format!("sphere r={r} n={n}: {v:.2e}"))?;
        ensure(dilation_balance_closed_form(&s) == Some(0.0), "closed form is not exactly zero")?;
        worst = worst.max(v.abs());
    }
    let e = surface(SurfaceSpec::Ellipsoid { axes: vec![2.0, 1.0, 1.0] });
    let g = e.grid(2048).map_err(|e| e.to_string())?;
    let v = dilation_balance(&e, &g).map_err(|e| e.to_string())?;
    ensure(v.abs() > 1e-4, format!("ellipsoid value {v:.2e} is not clearly nonzero"))?;
    Ok(format!("spheres within {worst:.1e}, ellipsoid(2,1,1) {v:.4}"))
}

fn nodal_domain_counts() -> Outcome {
    let q = AntisymmetricGenerator::plane(2, 0, 1);
    let e = surface(SurfaceSpec::Ellipsoid { axes: vec![2.0, 1.0] });
    let ge = e.grid(1024).map_err(|e| e.to_string())?;
    let ne = nodal_domains(&e, &q, &ge).map_err(|e| e.to_string())?;
    ensure(ne.count == 4, format!("ellipse gives {} domains", ne.count))?;
    let w = surface(SurfaceSpec::Curve { curve: PlanarCurve::polar_wave(1.0, 0.3, 6, 1024).unwrap() });
    let gw = w.grid(1024).map_err(|e| e.to_string())?;
    let nw = nodal_domains(&w, &q, &gw).map_err(|e| e.to_string())?;
    ensure(nw.count > 4 && nw.excludes_minimizer, format!("wavy curve gives {} domains", nw.count))?;
    Ok(format!("ellipse {} domains, wavy curve {} (excluded)", ne.count, nw.count))
}

fn shooting() -> Outcome {
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-13, ..Default::default() };
    let arc = shoot_curve(0.0, [1.0, 0.0], PI / 2.0, 2.0 * PI, opts).map_err(|e| e.to_string())?;
    ensure(arc.closure_residual() < 1e-8, format!("circle residual {:.2e}", arc.closure_residual()))?;
    let c = find_closed_curve((-3.0, -0.1), 3, ClosedCurveOptions::default()).map_err(|e| e.to_string())?;
    ensure(c.lambda < 0.0 && c.min_curvature > 0.0, "curve not convex with negative lambda")?;
    ensure(c.closure_residual < 1e-8, format!("closure residual {:.2e}", c.closure_residual))?;
    let s = surface(SurfaceSpec::Curve { curve: c.curve.clone() });
    let g = s.grid(2048).map_err(|e| e.to_string())?;
    let res = s.lambda_residual(c.lambda, &g).map_err(|e| e.to_string())?;
    ensure(res.max < 1e-6, format!("lambda residual {:.2e}", res.max))?;
    Ok(format!("circle {:.1e}; lambda_3 = {:.8}, closure {:.1e}, residual {:.1e}", arc.closure_residual(), c.lambda, c.closure_residual, res.max))
}

fn flow() -> Outcome {
    let r = (2.0 * 2f64.ln()).sqrt();
    let curve = PlanarCurve::from_parametric(|t| [(r + 0.05 * (4.0 * t).cos()) * t.cos(), (r + 0.05 * (4.0 * t).cos()) * t.sin()], 512, true).unwrap();
    let (res, dt) = timed(|| mcf_minimize(FlowShape::Curve(curve), 0.5, FlowOptions::default()));
    let res = res.map_err(|e| e.to_string())?;
    ensure(res.status == FlowStatus::Converged, format!("status {:?}", res.status))?;
    ensure(res.state.defect < 1e-6, format!("defect {:.2e}", res.state.defect))?;
    for w in res.trajectory.windows(2) {
        ensure(w[1][1] <= w[0][1], format!("perimeter rose at step {}", w[1][0]))?;
        ensure((w[1][2] - w[0][2]).abs() < 1e-8, format!("volume drift at step {}", w[1][0]))?;
    }
    let dev = res.state.shape.points().iter().map(|p| (p[0].hypot(p[1]) - r).abs()).fold(0.0f64, f64::max);
    ensure(dev < 1e-5, format!("max radial deviation {dev:.2e}"))?;
    ensure(dt < Duration::from_secs(30), format!("took {dt:?}"))?;
    Ok(format!("{} steps, defect {:.1e}, radial deviation {dev:.1e}, {dt:.2?}", res.trajectory.len() - 1, res.state.defect))
}

fn cylinder_ranking() -> Outcome {
    let rows = cylinder_scan(2, 0.5).map_err(|e| e.to_string())?;
    let first = |k: usize| rows.iter().position(|r| r.k == k).unwrap();
    ensure(first(2) < first(1) && first(1) < first(0), "ranking is not ball < cylinder < slab")?;
    for (k, want) in [(2, 0.5783), (1, 0.5887), (0, 0.6356)] {
        let p = rows[first(k)].perimeter;
        ensure((p - want).abs() <= 5e-4, format!("k={k}: {p} vs {want}"))?;
    }
    for row in &rows {
        let cf = row.report.closed_form.ok_or("missing closed forms")?;
        let holds = |name: &str| row.report.verdicts.iter().find(|v| v.condition == name).map(|v| v.holds);
        // round cylinders are convex, so the excess verdict is exactly I1 > 0, i.e. r < sqrt(k)
        let thin = row.k > 0 && row.radius < (row.k as f64).sqrt();
        ensure(holds("convex-curvature-excess") == Some(thin), format!("{}: excess verdict vs r < sqrt(k)", row.label))?;
        ensure((cf.i1 > 0.0) == thin, format!("{}: closed-form I1 sign", row.label))?;
        ensure(holds("curvature-deficit") == Some(cf.i2 < 0.0), format!("{}: deficit verdict vs closed-form I2", row.label))?;
    }
    Ok(rows.iter().map(|r| format!("{} {:.4}", r.label, r.perimeter)).collect::<Vec<_>>().join(" < "))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("numeric table", numeric_table),
        ("high-dimensional limit", high_dimensional_limit),
        ("sphere spectrum", sphere_spectrum),
        ("identity suite", identity_suite),
        ("Monte Carlo inner products", monte_carlo_inner_products),
        ("random bilinear chain", random_bilinear_chain),
        ("finite-difference second variation", fd_cross_check),
        ("dilation balance", dilation_balance_criterion),
        ("nodal domains", nodal_domain_counts),
        ("shooting", shooting),
        ("constrained flow", flow),
        ("cylinder scan", cylinder_ranking),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
