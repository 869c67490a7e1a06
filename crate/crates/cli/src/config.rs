use std::path::{Path, PathBuf};

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand, ValueEnum};
use lindstedt::bifurcation::{Branch, GridSpec, Sheet, Surface};
use lindstedt::params::{CouplingCase, LibrationPoint};
use serde::Deserialize;

/// Bad flag combinations or an unreadable config file (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Parser, Debug)]
#[command(name = "lindstedt", version, about = "Lindstedt–Poincaré series and bifurcations at the collinear points of the elliptic RTBP")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print gamma, the Legendre coefficients and the linear constants of a libration point.
    Params {
        #[command(flatten)]
        sys: SystemArgs,
    },
    /// Build a solution and write every coefficient as JSON.
    Build {
        #[command(flatten)]
        sys: SystemArgs,
        /// Fixed eta (default: coefficients kept as polynomials in eta).
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
    },
    /// Solve and classify the order-3 bifurcation equation.
    Bifurcate {
        #[command(subcommand)]
        action: BifurcateCommand,
    },
    /// Sample a critical surface of the bifurcation equation as CSV.
    Surface {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// Evaluate the series along one orbit and write the trajectory as CSV.
    Orbit {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        amp: AmpArgs,
        #[command(flatten)]
        span: SpanArgs,
    },
    /// Residual, integration deviation and symmetry defects of one orbit, as JSON.
    Validate {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        amp: AmpArgs,
        #[command(flatten)]
        span: SpanArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum BifurcateCommand {
    /// Real roots eta of Delta = 0 at the given amplitudes.
    Solve {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        amp: AmpArgs,
    },
    /// Signs of the quartic coefficients and the surfaces the point lies on.
    Region {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        amp: AmpArgs,
    },
    /// Critical amplitudes on the coordinate axes.
    Threshold {
        #[command(flatten)]
        sys: SystemArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum System {
    SunEarth,
    EarthMoon,
}

impl System {
    /// `(mu, e)`.
    pub fn preset(self) -> (f64, f64) {
        match self {
            System::SunEarth => (3.040423398444176e-6, 0.01671022),
            System::EarthMoon => (0.0121505856, 0.0549),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Point {
    #[serde(alias = "L1")]
    L1,
    #[serde(alias = "L2")]
    L2,
    #[serde(alias = "L3")]
    L3,
}

impl From<Point> for LibrationPoint {
    fn from(p: Point) -> Self {
        match p {
            Point::L1 => LibrationPoint::L1,
            Point::L2 => LibrationPoint::L2,
            Point::L3 => LibrationPoint::L3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    X2z,
    Y2z,
    Z2y,
}

impl From<Case> for CouplingCase {
    fn from(c: Case) -> Self {
        match c {
            Case::X2z => CouplingCase::XToZ,
            Case::Y2z => CouplingCase::YToZ,
            Case::Z2y => CouplingCase::ZToY,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchArg {
    Small,
    Large,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Small => Branch::SmallBranch,
            BranchArg::Large => Branch::LargeBranch,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceArg {
    C,
    A,
    Disc,
}

impl From<SurfaceArg> for Surface {
    fn from(s: SurfaceArg) -> Self {
        match s {
            SurfaceArg::C => Surface::C,
            SurfaceArg::A => Surface::A,
            SurfaceArg::Disc => Surface::Disc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SheetArg {
    Transit,
    NonTransit,
}

impl From<SheetArg> for Sheet {
    fn from(s: SheetArg) -> Self {
        match s {
            SheetArg::Transit => Sheet::Transit,
            SheetArg::NonTransit => Sheet::NonTransit,
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct SystemArgs {
    /// JSON file with the same keys as the flags (snake_case); flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Mass ratio and eccentricity preset (default sun-earth).
    #[arg(long, value_enum)]
    pub system: Option<System>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub e: Option<f64>,
    #[arg(long, value_enum, ignore_case = true)]
    pub point: Option<Point>,
    #[arg(long, value_enum)]
    pub case: Option<Case>,
    /// Series order (bifurcation forms always use order 3).
    #[arg(long)]
    pub order: Option<u32>,
    /// Degree in eta kept for Delta (default 2(order - 1)).
    #[arg(long)]
    pub eta_degree: Option<usize>,
    /// Output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct AmpArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2: Option<f64>,
    /// Hyperbolic amplitude magnitude; imaginary with --transit.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "a3sq")]
    pub a3: Option<f64>,
    /// Signed alpha3 squared; negative means the transit branch.
    #[arg(long, allow_hyphen_values = true)]
    pub a3sq: Option<f64>,
    #[arg(long)]
    pub transit: bool,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "branch")]
    pub eta: Option<f64>,
    /// Pick eta from a root of the order-3 bifurcation equation.
    #[arg(long, value_enum)]
    pub branch: Option<BranchArg>,
    /// With --branch, take the negative root.
    #[arg(long)]
    pub negative: bool,
}

#[derive(Args, Debug, Default)]
pub struct SpanArgs {
    /// Length of the true anomaly interval (default 2 pi).
    #[arg(long)]
    pub span: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct MeshArgs {
    #[arg(long, value_enum)]
    pub surface: Option<SurfaceArg>,
    #[arg(long, value_enum)]
    pub sheet: Option<SheetArg>,
    #[arg(long)]
    pub a1_max: Option<f64>,
    #[arg(long)]
    pub a2_max: Option<f64>,
    #[arg(long)]
    pub a3_max: Option<f64>,
    /// Samples per axis.
    #[arg(long)]
    pub grid: Option<usize>,
}

/// Config file contents; every key optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    system: Option<System>,
    mu: Option<f64>,
    e: Option<f64>,
    point: Option<Point>,
    case: Option<Case>,
    order: Option<u32>,
    eta_degree: Option<usize>,
    out: Option<PathBuf>,
    a1: Option<f64>,
    a2: Option<f64>,
    a3: Option<f64>,
    a3sq: Option<f64>,
    transit: Option<bool>,
    eta: Option<f64>,
    branch: Option<BranchArg>,
    negative: Option<bool>,
    span: Option<f64>,
    samples: Option<usize>,
    surface: Option<SurfaceArg>,
    sheet: Option<SheetArg>,
    a1_max: Option<f64>,
    a2_max: Option<f64>,
    a3_max: Option<f64>,
    grid: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("bad config {}: {e}", path.display())))
    }
}

/// Settings shared by every command after merging flags, config file and preset.
#[derive(Debug)]
pub struct RunConfig {
    pub mu: f64,
    pub e: f64,
    pub point: LibrationPoint,
    pub case: CouplingCase,
    pub order: Option<u32>,
    pub eta_degree: Option<usize>,
    pub out: Option<PathBuf>,
    pub file: FileConfig,
}

impl RunConfig {
    pub fn resolve(sys: &SystemArgs) -> anyhow::Result<Self> {
        let file = match &sys.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let system = sys.system.or(file.system).unwrap_or(System::SunEarth);
        let (mu0, e0) = system.preset();
        let run = RunConfig {
            mu: sys.mu.or(file.mu).unwrap_or(mu0),
            e: sys.e.or(file.e).unwrap_or(e0),
            point: sys.point.or(file.point).unwrap_or(Point::L1).into(),
            case: sys.case.or(file.case).unwrap_or(Case::X2z).into(),
            order: sys.order.or(file.order),
            eta_degree: sys.eta_degree.or(file.eta_degree),
            out: sys.out.clone().or_else(|| file.out.clone()),
            file,
        };
        run.validate()?;
        Ok(run)
    }

    fn validate(&self) -> lindstedt::Result<()> {
        use lindstedt::Error::Domain;
        if !(self.mu > 0.0 && self.mu < 0.5) {
            return Err(Domain(format!("mu = {} outside (0, 0.5)", self.mu)));
        }
        if !(self.e >= 0.0 && self.e < 1.0) {
            return Err(Domain(format!("e = {} outside [0, 1)", self.e)));
        }
        if self.order == Some(0) {
            return Err(Domain("order must be at least 1".into()));
        }
        Ok(())
    }
}

/// How eta is chosen for an orbit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EtaChoice {
    Value(f64),
    Root { branch: Branch, negative: bool },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitudes {
    pub a1: f64,
    pub a2: f64,
    /// Magnitude of alpha3.
    pub a3: f64,
    pub transit: bool,
    pub eta: Option<EtaChoice>,
}

impl Amplitudes {
    pub fn resolve(amp: &AmpArgs, file: &FileConfig) -> anyhow::Result<Self> {
        let a3 = amp.a3.or(file.a3);
        let a3sq = amp.a3sq.or(file.a3sq);
        let transit_flag = amp.transit || file.transit.unwrap_or(false);
        let (a3, transit) = match (a3, a3sq) {
            (Some(_), Some(_)) => return Err(usage("give either --a3 or --a3sq, not both")),
            (_, Some(s)) => {
                if transit_flag && s > 0.0 {
                    return Err(usage("--transit needs a negative --a3sq"));
                }
                (s.abs().sqrt(), s < 0.0)
            }
            (a, None) => (a.unwrap_or(0.0), transit_flag),
        };
        let eta = match (amp.eta.or(file.eta), amp.branch.or(file.branch)) {
            (Some(_), Some(_)) => return Err(usage("give either --eta or --branch, not both")),
            (Some(v), None) => Some(EtaChoice::Value(v)),
            (None, Some(b)) => {
                Some(EtaChoice::Root { branch: b.into(), negative: amp.negative || file.negative.unwrap_or(false) })
            }
            (None, None) => None,
        };
        let vals = [amp.a1.or(file.a1).unwrap_or(0.0), amp.a2.or(file.a2).unwrap_or(0.0), a3];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(lindstedt::Error::Domain("amplitudes must be finite".into()).into());
        }
        Ok(Amplitudes { a1: vals[0], a2: vals[1], a3, transit, eta })
    }

    pub fn a3_sq(&self) -> f64 {
        if self.transit {
            -self.a3 * self.a3
        } else {
            self.a3 * self.a3
        }
    }
}

pub fn span(args: &SpanArgs, file: &FileConfig, default_samples: usize) -> anyhow::Result<(f64, usize)> {
    let span = args.span.or(file.span).unwrap_or(2.0 * std::f64::consts::PI);
    let samples = args.samples.or(file.samples).unwrap_or(default_samples);
    if !(span > 0.0 && span.is_finite()) {
        return Err(lindstedt::Error::Domain(format!("span = {span} must be positive")).into());
    }
    if samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    Ok((span, samples))
}

pub struct MeshSettings {
    pub surface: Surface,
    pub sheet: Sheet,
    pub grid: GridSpec<f64>,
}

pub fn mesh(args: &MeshArgs, file: &FileConfig) -> MeshSettings {
    let mut grid = GridSpec::new(
        args.a1_max.or(file.a1_max).unwrap_or(0.5),
        args.a2_max.or(file.a2_max).unwrap_or(0.5),
        args.a3_max.or(file.a3_max).unwrap_or(2.0),
    );
    if let Some(n) = args.grid.or(file.grid) {
        grid = grid.with_samples([n; 3]);
    }
    MeshSettings {
        surface: args.surface.or(file.surface).unwrap_or(SurfaceArg::C).into(),
        sheet: args.sheet.or(file.sheet).unwrap_or(SheetArg::Transit).into(),
        grid,
    }
}

/// Opens `--out` with context, or `None` for stdout.
pub fn open_out(path: &Option<PathBuf>) -> anyhow::Result<Option<std::fs::File>> {
    path.as_ref()
        .map(|p| std::fs::File::create(p).with_context(|| format!("cannot create {}", p.display())))
        .transpose()
}
