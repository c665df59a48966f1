//! Line-oriented surface descriptions such as `sphere r=1.414 n=2` or
//! `curve file=gamma3.csv symmetric=false`.
//!
//! Recognised kinds: `sphere r n`, `cylinder r k n`, `strip t n`,
//! `ellipsoid axes=a,b,..`, `polar base amp freq [m]`, `curve file
//! [symmetric]`, `profile file n`. A bare `complement` token selects the
//! complementary solid.

use super::{make_surface, PlanarCurve, RevolutionProfile, Surface, SurfaceSpec};
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;

/// Parses a surface description. Relative file names resolve against `base`.
pub fn parse_surface(line: &str, base: Option<&Path>) -> Result<Surface> {
    let mut words = line.split_whitespace();
    let kind = words.next().ok_or_else(|| Error::Format("empty surface description".into()))?.to_ascii_lowercase();
    let mut kv = BTreeMap::new();
    let mut complement = false;
    for w in words {
        if w == "complement" {
            complement = true;
            continue;
        }
        let (k, v) = w.split_once('=').ok_or_else(|| Error::Format(format!("expected key=value, got `{w}`")))?;
        kv.insert(k.to_ascii_lowercase(), v.to_string());
    }
    let mut args = Args { kind: &kind, kv };
    let spec = match kind.as_str() {
        "sphere" => SurfaceSpec::Sphere { r: args.num("r")?, n: args.int("n")? },
        "cylinder" => SurfaceSpec::Cylinder { r: args.num("r")?, k: args.int("k")?, n: args.int("n")? },
        "strip" => SurfaceSpec::Strip { t: args.num("t")?, n: args.int("n")? },
        "ellipsoid" => {
            let axes = args.take("axes")?.split(',').map(|s| s.trim().parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>();
            SurfaceSpec::Ellipsoid { axes: axes.map_err(|e| Error::Format(format!("axes: {e}")))? }
        }
        "polar" => {
            let m = args.opt_int("m")?.unwrap_or(512);
            let curve = PlanarCurve::polar_wave(args.num("base")?, args.num("amp")?, args.int("freq")? as u32, m)?;
            SurfaceSpec::Curve { curve }
        }
        "curve" => {
            let path = resolve(&args.take("file")?, base);
            let symmetric = args.opt_bool("symmetric")?.unwrap_or(false);
            let rows = crate::io::read_curve_csv(&path)?;
            SurfaceSpec::Curve { curve: PlanarCurve::from_closed_polyline(rows, symmetric)? }
        }
        "profile" => {
            let path = resolve(&args.take("file")?, base);
            let n = args.int("n")?;
            let rows = crate::io::read_curve_csv(&path)?;
            let profile = RevolutionProfile::new(PlanarCurve::from_closed_polyline(rows, false)?)?;
            SurfaceSpec::Profile { profile, n }
        }
        other => return Err(Error::Format(format!("unknown surface kind `{other}`"))),
    };
    args.finish()?;
    Ok(make_surface(spec)?.with_complement(complement))
}

/// Describes a surface in the same syntax. Sampled curves and profiles are
/// summarised by node count since their samples live in separate files.
pub fn format_surface(s: &Surface) -> String {
    let body = match s.spec() {
        SurfaceSpec::Sphere { r, n } => format!("sphere r={r} n={n}"),
        SurfaceSpec::Cylinder { r, k, n } => format!("cylinder r={r} k={k} n={n}"),
        SurfaceSpec::Strip { t, n } => format!("strip t={t} n={n}"),
        SurfaceSpec::Ellipsoid { axes } => {
            format!("ellipsoid axes={}", axes.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","))
        }
        SurfaceSpec::Curve { curve } => format!("curve nodes={} symmetric={}", curve.len(), curve.is_symmetric()),
        SurfaceSpec::Profile { profile, n } => format!("profile nodes={} n={n}", profile.curve().len()),
    };
    if s.is_complement() {
        body + " complement"
    } else {
        body
    }
}

fn resolve(file: &str, base: Option<&Path>) -> std::path::PathBuf {
    match base {
        Some(b) if Path::new(file).is_relative() => b.join(file),
        _ => Path::new(file).to_path_buf(),
    }
}

struct Args<'a> {
    kind: &'a str,
    kv: BTreeMap<String, String>,
}

impl Args<'_> {
    fn take(&mut self, key: &str) -> Result<String> {
        self.kv.remove(key).ok_or_else(|| Error::Format(format!("{} needs `{key}=`", self.kind)))
    }

    fn num(&mut self, key: &str) -> Result<f64> {
        let v = self.take(key)?;
        v.parse().map_err(|_| Error::Format(format!("`{key}={v}` is not a number")))
    }

    fn int(&mut self, key: &str) -> Result<usize> {
        let v = self.take(key)?;
        v.parse().map_err(|_| Error::Format(format!("`{key}={v}` is not a non-negative integer")))
    }

    fn opt_int(&mut self, key: &str) -> Result<Option<usize>> {
        if self.kv.contains_key(key) {
            self.int(key).map(Some)
        } else {
            Ok(None)
        }
    }

    fn opt_bool(&mut self, key: &str) -> Result<Option<bool>> {
        match self.kv.remove(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| Error::Format(format!("`{key}={v}` is not a boolean"))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.kv.keys().next() {
            Some(k) => Err(Error::Format(format!("unexpected key `{k}` for {}", self.kind))),
            None => Ok(()),
        }
    }
}
