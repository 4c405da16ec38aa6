use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use pgl_core::analysis::{build_curve, run_analysis, AnalysisConfig, AnalysisError, EpsWeighting};
use pgl_core::detector::{default_family_grid, verify_theorem};
use pgl_core::{calibrate, ExponentialFamilyParams, Mesh, Sign, SurfaceKind, Tolerances};
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_HELP: &str = "\
Exit codes:
  0   success (verify: every check passed)
  1   verify: a theorem check failed
  2   invalid configuration (grid smaller than 2x2, degenerate range, bad projection axes)
  3   detection-stage error (stencil leaves the curve domain, too few samples)
  64  configuration file unreadable or not valid JSON for the expected schema
  65  invalid curve (bad parameters, unit-speed or regularity failure, family constraint violated)
  74  output file could not be written

Environment:
  PGL_THREADS  caps the number of worker threads";

#[derive(Parser)]
#[command(name = "pgl", version, about = "Rotational surfaces in E^4_2: curvature, Gauss map and 1-type detection", after_help = EXIT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse the surface described by a JSON config and write a JSON report.
    #[command(after_help = EXIT_HELP)]
    Analyze(AnalyzeArgs),
    /// Check the flat 1-type claims on a member of the exponential family.
    #[command(after_help = EXIT_HELP)]
    Verify(VerifyArgs),
    /// Write an OBJ and/or CSV mesh of the surface described by a config.
    #[command(after_help = EXIT_HELP)]
    Mesh(MeshArgs),
    /// Print which Laplacian weighting reproduces the closed forms.
    Calibrate,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Grid size as NTxNS, e.g. 33x33.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Rotation parameter window a:b.
    #[arg(long = "t-range", value_parser = parse_range, allow_hyphen_values = true)]
    t_range: Option<[f64; 2]>,
    /// Profile parameter window a:b.
    #[arg(long = "s-range", value_parser = parse_range, allow_hyphen_values = true)]
    s_range: Option<[f64; 2]>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    config: PathBuf,
    /// Report path; defaults to the config's output.report, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long = "tol-detect")]
    tol_detect: Option<f64>,
    /// Mesh projection axes i,j,k (1-based).
    #[arg(long, value_parser = parse_axes)]
    project: Option<[usize; 3]>,
    /// Use the finite-difference Laplacian instead of the closed form.
    #[arg(long = "numeric-laplacian")]
    numeric_laplacian: bool,
    /// Richardson-extrapolate the numeric Laplacian.
    #[arg(long)]
    richardson: bool,
    #[arg(long = "eps-weighted", value_enum)]
    eps_weighted: Option<Weighting>,
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long)]
    config: PathBuf,
    /// OBJ output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_parser = parse_axes)]
    project: Option<[usize; 3]>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, allow_hyphen_values = true)]
    b0: f64,
    #[arg(long, allow_hyphen_values = true)]
    mu1: f64,
    #[arg(long, allow_hyphen_values = true)]
    mu2: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    d: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    eps: i8,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long = "tol-detect")]
    tol_detect: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    #[value(name = "M1", alias = "m1")]
    M1,
    #[value(name = "M2", alias = "m2")]
    M2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Weighting {
    Auto,
    On,
    Off,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxM, got {s:?}"))?;
    let n = a.trim().parse().map_err(|e| format!("bad grid size {a:?}: {e}"))?;
    let m = b.trim().parse().map_err(|e| format!("bad grid size {b:?}: {e}"))?;
    Ok((n, m))
}

fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    let lo = a.trim().parse().map_err(|e| format!("bad bound {a:?}: {e}"))?;
    let hi = b.trim().parse().map_err(|e| format!("bad bound {b:?}: {e}"))?;
    Ok([lo, hi])
}

fn parse_axes(s: &str) -> Result<[usize; 3], String> {
    let v: Vec<usize> =
        s.split(',').map(|x| x.trim().parse().map_err(|e| format!("bad axis {x:?}: {e}"))).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected three axes i,j,k, got {s:?}"))
}

/// An error carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self { code, error: error.into() }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let code = match e {
            AnalysisError::Config(_) => 2,
            AnalysisError::Detection(_) => 3,
            AnalysisError::Curve(_) | AnalysisError::Validation(_) => 65,
        };
        Failure::new(code, e)
    }
}

fn load_config(path: &Path) -> Result<AnalysisConfig, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(|e| Failure::new(64, e))?;
    AnalysisConfig::from_json(&text)
        .with_context(|| format!("cannot parse {}", path.display()))
        .map_err(|e| Failure::new(64, e))
}

fn apply_grid(cfg: &mut AnalysisConfig, g: &GridArgs) {
    if let Some((nt, ns)) = g.grid {
        cfg.grid.nt = nt;
        cfg.grid.ns = ns;
    }
    if g.t_range.is_some() {
        cfg.grid.t_range = g.t_range;
    }
    if g.s_range.is_some() {
        cfg.grid.s_range = g.s_range;
    }
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::new(74, e))?;
    text.push('\n');
    match out {
        Some(p) => {
            fs::write(p, text).with_context(|| format!("cannot write {}", p.display())).map_err(|e| Failure::new(74, e))
        }
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::new(74, e)),
    }
}

fn write_mesh(cfg: &AnalysisConfig, obj: Option<&Path>, csv: Option<&Path>) -> Result<(), Failure> {
    cfg.check()?;
    let curve = build_curve(cfg)?;
    let mut mesh_cfg = cfg.clone();
    mesh_cfg.flags.numeric_laplacian = false;
    let grid = mesh_cfg.resolve_grid(&curve)?;
    let mesh = Mesh::build(cfg.surface, &curve, &grid).map_err(|e| Failure::new(65, e))?;
    let io = |p: &Path, e: std::io::Error| {
        Failure::new(74, anyhow::Error::new(e).context(format!("cannot write {}", p.display())))
    };
    if let Some(p) = obj {
        let mut buf = Vec::new();
        mesh.write_obj(&mut buf, cfg.projection).map_err(|e| io(p, e))?;
        fs::write(p, buf).map_err(|e| io(p, e))?;
    }
    if let Some(p) = csv {
        let mut buf = Vec::new();
        mesh.write_csv(&mut buf).map_err(|e| io(p, e))?;
        fs::write(p, buf).map_err(|e| io(p, e))?;
    }
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let mut cfg = load_config(&args.config)?;
    apply_grid(&mut cfg, &args.grid);
    if let Some(t) = args.tol_detect {
        cfg.tolerances.detect = t;
    }
    if let Some(p) = args.project {
        cfg.projection = p;
    }
    cfg.flags.numeric_laplacian |= args.numeric_laplacian;
    cfg.flags.richardson |= args.richardson;
    if let Some(w) = args.eps_weighted {
        cfg.flags.eps_weighted = match w {
            Weighting::Auto => EpsWeighting::Auto,
            Weighting::On => EpsWeighting::On,
            Weighting::Off => EpsWeighting::Off,
        };
    }
    let report = run_analysis(&cfg)?;
    let out = args.out.or_else(|| cfg.output.report.clone());
    write_json(&report, out.as_deref())?;
    if cfg.output.obj.is_some() || cfg.output.csv.is_some() {
        write_mesh(&cfg, cfg.output.obj.as_deref(), cfg.output.csv.as_deref())?;
    }
    Ok(())
}

fn mesh(args: MeshArgs) -> Result<(), Failure> {
    let mut cfg = load_config(&args.config)?;
    apply_grid(&mut cfg, &args.grid);
    if let Some(p) = args.project {
        cfg.projection = p;
    }
    let obj = args.out.or_else(|| cfg.output.obj.clone());
    let csv = args.csv.or_else(|| cfg.output.csv.clone());
    if obj.is_none() && csv.is_none() {
        return Err(Failure::new(2, anyhow::anyhow!("no mesh output given: pass --out and/or --csv")));
    }
    write_mesh(&cfg, obj.as_deref(), csv.as_deref())
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let kind = match args.kind {
        Kind::M1 => SurfaceKind::M1Hyperbolic,
        Kind::M2 => SurfaceKind::M2Elliptic,
    };
    let eps = Sign::try_from(args.eps).map_err(|e| Failure::new(65, anyhow::anyhow!(e)))?;
    let params = ExponentialFamilyParams::new(args.b0, args.mu1, args.mu2, args.d, eps);
    let mut tol = Tolerances::default();
    if let Some(t) = args.tol_detect {
        tol.detect = t;
    }
    params.check(&tol).map_err(|e| Failure::new(65, e))?;
    let mut grid = default_family_grid(kind);
    if let Some((nt, ns)) = args.grid.grid {
        grid.nt = nt;
        grid.ns = ns;
    }
    if let Some(t) = args.grid.t_range {
        grid.t_range = t;
        grid.t_endpoint = true;
    }
    if let Some(s) = args.grid.s_range {
        grid.s_range = s;
    }
    grid.check().map_err(|e| Failure::new(2, anyhow::anyhow!(e)))?;
    let check = verify_theorem(kind, params, &grid, &tol);
    write_json(&check, args.out.as_deref())?;
    if check.passed {
        Ok(())
    } else {
        Err(Failure::new(1, anyhow::anyhow!("check failed at {}", check.failing_stage.unwrap_or_default())))
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("PGL_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Verify(a) => verify(a),
        Command::Mesh(a) => mesh(a),
        Command::Calibrate => write_json(&calibrate(), None),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pgl: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
