use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "gsa", version, about = "Gaussian surface area experiments")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Seed for every random draw; recorded in the output.
    #[arg(long, global = true, env = "GSA_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Gaussian boundary area of the centred ball of measure c, per dimension.
    Table(TableArgs),
    /// Evaluate curvature identities on a surface.
    Verify(VerifyArgs),
    /// Rank round cylinders and their complements at Gaussian volume c.
    Scan(ScanArgs),
    /// Top eigenvalues of the stability operator.
    Spectrum(SpectrumArgs),
    /// Construct a closed m-fold symmetric lambda-curve by shooting.
    Shoot(ShootArgs),
    /// Volume-constrained gradient flow of Gaussian perimeter.
    Flow(FlowArgs),
    /// Random bilinear test functions in the stability form.
    Random(RandomArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Table(_) => "table",
            Command::Verify(_) => "verify",
            Command::Scan(_) => "scan",
            Command::Spectrum(_) => "spectrum",
            Command::Shoot(_) => "shoot",
            Command::Flow(_) => "flow",
            Command::Random(_) => "random",
        }
    }
}

impl Cli {
    /// The resolved configuration embedded in every output.
    pub fn config(&self) -> Value {
        json!({
            "command": self.command.name(),
            "format": self.common.format,
            "seed": self.common.seed,
            "options": self.command,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let c: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if c > 0.0 && c < 1.0 {
        Ok(c)
    } else {
        Err(format!("volume must lie strictly between 0 and 1, got {c}"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {v}"))
    }
}

/// `auto` or a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaArg {
    Auto,
    Value(f64),
}

impl std::str::FromStr for LambdaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(LambdaArg::Auto);
        }
        s.parse().map(LambdaArg::Value).map_err(|_| format!("expected `auto` or a number, got `{s}`"))
    }
}

impl Serialize for LambdaArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            LambdaArg::Auto => s.serialize_str("auto"),
            LambdaArg::Value(v) => s.serialize_f64(*v),
        }
    }
}

/// `lo,hi` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket(pub f64, pub f64);

impl std::str::FromStr for Bracket {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or("expected `lo,hi`")?;
        let lo: f64 = a.trim().parse().map_err(|e| format!("lower end: {e}"))?;
        let hi: f64 = b.trim().parse().map_err(|e| format!("upper end: {e}"))?;
        if lo < hi {
            Ok(Bracket(lo, hi))
        } else {
            Err(format!("empty bracket [{lo}, {hi}]"))
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct TableArgs {
    /// Ambient dimensions, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub dims: Vec<usize>,
    #[arg(long, value_parser = unit_interval, default_value_t = 0.5)]
    pub c: f64,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("which").required(true).args(["all", "id"])))]
pub struct VerifyArgs {
    /// Surface description, e.g. "cylinder r=1 k=1 n=2" or "curve file=c.csv".
    #[arg(long)]
    pub surface: String,
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    pub lambda: LambdaArg,
    /// Check every identity.
    #[arg(long)]
    pub all: bool,
    /// Identity names such as LH or ROT_MEAN; repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    pub id: Vec<String>,
    /// Grid resolution; defaults to the node count of sampled surfaces, else 256.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Largest accepted residual.
    #[arg(long, value_parser = positive, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    /// Hypersurface dimension; the ambient space is R^(n+1).
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_parser = unit_interval, default_value_t = 0.5)]
    pub c: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub surface: String,
    /// Highest harmonic degree for spheres.
    #[arg(long, default_value_t = 4)]
    pub lmax: usize,
    /// Number of eigenvalues computed numerically on other surfaces.
    #[arg(long, default_value_t = 8)]
    pub count: usize,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct ShootArgs {
    /// Search interval for lambda, e.g. -3,-0.1.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_bracket: Bracket,
    /// Order of the dihedral symmetry.
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Nodes of the emitted curve, rounded up to a multiple of 2m.
    #[arg(long, default_value_t = 2048)]
    pub nodes: usize,
    /// Sub-intervals of the lambda scan.
    #[arg(long, default_value_t = 64)]
    pub scan: usize,
    #[arg(long, value_parser = positive, default_value_t = 3.0)]
    pub start_radius: f64,
    /// Largest accepted closure residual.
    #[arg(long, value_parser = positive, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct FlowArgs {
    /// Initial shape: a curve, a profile, "sphere r=.. n=1" or a planar ellipse.
    #[arg(long)]
    pub surface: String,
    #[arg(long, value_parser = unit_interval, default_value_t = 0.5)]
    pub c: f64,
    /// Nodes used when the shape is given analytically.
    #[arg(long, default_value_t = 256)]
    pub nodes: usize,
    /// Stationarity tolerance on the weighted spread of H - <x,N>.
    #[arg(long, value_parser = positive, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_parser = positive, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long, default_value_t = 20_000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 10)]
    pub resample_every: usize,
    /// Also write the final curve here as s,x,y rows.
    #[arg(long)]
    pub curve_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct RandomArgs {
    #[arg(long)]
    pub surface: String,
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    pub lambda: LambdaArg,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Monte Carlo slack, in standard errors, for the mean-versus-analytic check.
    #[arg(long, value_parser = positive, default_value_t = 3.0)]
    pub sigmas: f64,
}
