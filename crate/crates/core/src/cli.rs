//! `fusion` command line. Inputs and reports are JSON; tables can also be
//! exported as CSV.
//!
//! Exit codes: 0 when every check passes, 1 for a failed check or a
//! numerical failure, 2 for unusable input, 3 for a point outside its region.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuchsian::{fuchsian_solve, residual, MatrixSeries, SolveOptions, SystemJson};
use crate::heisenberg::{FockModule, ModuleConfig};
use crate::logseries::{LogPowerSeries, LpsJson};
use crate::pipeline::{check_associativity, check_pentagon, sample_points, PipelineConfig};
use crate::rewriter::{symbolic_connection, Chain, ConnectionOptions, Normalization, QuadrupleJson, Reducer};
use crate::scalar::{parse_q, GaussRational, Scalar, Q};

#[derive(Parser, Debug)]
#[command(name = "fusion", version, about = "Fusion-product correlators on the free-boson testbed")]
pub struct Cli {
    /// Run configuration (JSON); flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Arithmetic mode.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Series order.
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Relative tolerance of the checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output JSON path (stdout when absent).
    #[arg(long, global = true, visible_alias = "report")]
    pub out: Option<PathBuf>,
    /// Also write the main table as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    #[default]
    Float,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Log-power series operations.
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Fuchsian systems.
    #[command(subcommand)]
    Fuchsian(FuchsianCmd),
    /// Reduce a correlator symbol to basis quadruples.
    Reduce(ReduceArgs),
    /// Emit Λ²³ or Λ³⁴ as a system readable by `fuchsian solve`.
    ConnectionMatrix(ConnectionArgs),
    /// Associativity of four-point functions at sample points.
    AssocCheck(AssocArgs),
    /// The five bracketings of a five-point function.
    PentagonCheck(PentagonArgs),
}

#[derive(Subcommand, Debug)]
pub enum SeriesCmd {
    /// Evaluate a series on the principal branch.
    Eval {
        #[arg(long)]
        input: PathBuf,
        /// `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum FuchsianCmd {
    /// Fundamental solution around the system's base point.
    Solve {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct ModuleArgs {
    /// JSON list of the module configs of A, B, C.
    #[arg(long)]
    pub module_config: Option<PathBuf>,
    /// `a,b,c` (rationals allowed), all modules cut off at `--grade-cutoff`.
    #[arg(long)]
    pub momenta: Option<String>,
    #[arg(long)]
    pub grade_cutoff: Option<u32>,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub modules: ModuleArgs,
    /// JSON `{theta, v, u, w}`.
    #[arg(long)]
    pub quadruple: PathBuf,
    #[arg(long, default_value = "y")]
    pub flavor: String,
    #[arg(long = "N")]
    pub n: Option<u32>,
    /// `a` for `⟨θ, 𝒴(v,x)𝒴(u,y)w⟩`, `b` for the iterate.
    #[arg(long, default_value = "a")]
    pub chain: String,
}

#[derive(Args, Debug)]
pub struct ConnectionArgs {
    #[command(flatten)]
    pub modules: ModuleArgs,
    #[arg(long, default_value = "xmy")]
    pub flavor: String,
    /// `y₀` for xmy, `x₀` for y, as `re` or `re,im`. Defaults to 4 and 7.
    #[arg(long, allow_hyphen_values = true)]
    pub basepoint: Option<String>,
    #[arg(long = "N")]
    pub n: Option<u32>,
}

#[derive(Args, Debug)]
pub struct AssocArgs {
    #[arg(long)]
    pub momenta: Option<String>,
    /// JSON list of points, `[x, y]` or `{"x": [re, im], "y": [re, im]}`.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Number of sampled points when no list is given.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub g_max: Option<u32>,
    #[arg(long = "N")]
    pub n: Option<u32>,
}

#[derive(Args, Debug)]
pub struct PentagonArgs {
    #[arg(long)]
    pub momenta: Option<String>,
    /// `x,y,z`.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    #[arg(long)]
    pub max_grade: Option<u32>,
}

/// A sample point: real `[x, y]` or complex `{"x": [re, im], "y": [re, im]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Real([f64; 2]),
    Complex { x: [f64; 2], y: [f64; 2] },
}

impl PointSpec {
    pub fn get(&self) -> (Complex64, Complex64) {
        match self {
            PointSpec::Real([x, y]) => (Complex64::new(*x, 0.0), Complex64::new(*y, 0.0)),
            PointSpec::Complex { x, y } => (Complex64::new(x[0], x[1]), Complex64::new(y[0], y[1])),
        }
    }
}

/// Run configuration file. Every field is optional; flags win.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub momenta: Option<Vec<String>>,
    pub modules: Option<Vec<ModuleConfig>>,
    pub pipeline: PipelineConfig,
    pub points: Option<Vec<PointSpec>>,
    /// Pentagon point `[x, y, z]` (real) or `[[re, im], …]`.
    pub point: Option<Vec<[f64; 2]>>,
    pub seed: Option<u64>,
    pub count: Option<usize>,
    pub radius: Option<f64>,
    pub max_grade: Option<u32>,
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{t}' in '{s}'")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::Parse(format!("expected re or re,im, got '{s}'"))),
    }
}

fn parse_gauss(s: &str) -> Result<GaussRational> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [re] => Ok(GaussRational::real(parse_q(re)?)),
        [re, im] => Ok(GaussRational::new(parse_q(re)?, parse_q(im)?)),
        _ => Err(Error::Parse(format!("expected re or re,im, got '{s}'"))),
    }
}

fn parse_momenta<const K: usize>(s: &[String]) -> Result<[Q; K]> {
    if s.len() != K {
        return Err(Error::Parse(format!("expected {K} momenta, got {}", s.len())));
    }
    let v = s.iter().map(|t| parse_q(t.trim())).collect::<Result<Vec<Q>>>()?;
    Ok(v.try_into().expect("length checked"))
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|t| t.trim().to_string()).collect()
}

/// The four Fock modules `[F_{a+b+c}, F_a, F_b, F_c]`.
fn modules(args: &ModuleArgs, cfg: &RunConfig) -> Result<[FockModule; 4]> {
    let cutoff = args.grade_cutoff.unwrap_or(cfg.pipeline.grade_cutoff);
    let list: Vec<ModuleConfig> = if let Some(p) = &args.module_config {
        read_json(p)?
    } else if let Some(m) = &args.momenta {
        split_list(m).into_iter().map(|momentum| ModuleConfig::Fock { momentum, grade_cutoff: cutoff }).collect()
    } else if let Some(m) = &cfg.modules {
        m.clone()
    } else if let Some(m) = &cfg.momenta {
        m.iter().map(|momentum| ModuleConfig::Fock { momentum: momentum.clone(), grade_cutoff: cutoff }).collect()
    } else {
        return Err(Error::Parse("need --module-config or --momenta".into()));
    };
    if list.len() != 3 {
        return Err(Error::Parse(format!("expected configs for A, B, C, got {}", list.len())));
    }
    let built = list.iter().map(ModuleConfig::build).collect::<Result<Vec<_>>>()?;
    let top = built.iter().map(FockModule::cutoff).max().unwrap_or(cutoff);
    let total = built.iter().map(|m| m.momentum().clone()).sum::<Q>();
    let [a, b, c]: [FockModule; 3] = built.try_into().expect("length checked");
    Ok([FockModule::new(total, top), a, b, c])
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => fs::write(p, text + "\n")?,
        None => {
            let mut so = std::io::stdout().lock();
            writeln!(so, "{text}")?;
        }
    }
    Ok(())
}

fn write_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct EvalReport {
    value: Complex64,
    tail: f64,
}

#[derive(Serialize)]
struct ReduceRow {
    theta: String,
    v: String,
    u: String,
    w: String,
    coefficient: String,
}

#[derive(Serialize)]
struct PointRow {
    x_re: f64,
    x_im: f64,
    y_re: f64,
    y_im: f64,
    a_bc_re: f64,
    a_bc_im: f64,
    ab_c_re: f64,
    ab_c_im: f64,
    closed_form_re: f64,
    closed_form_im: f64,
    deviation: f64,
    closed_form_deviation: f64,
    tail_a: f64,
    tail_b: f64,
}

#[derive(Serialize)]
struct BracketRow {
    bracketing: &'static str,
    value_re: f64,
    value_im: f64,
    tail: f64,
}

/// Parse flags, run one command, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Json(_) | Error::Invalid(_) | Error::VariableMismatch(..) => 2,
        Error::Region(_) | Error::BranchCut(_) => 3,
        _ => 1,
    }
}

/// `Ok(passed)`.
fn dispatch(cli: &Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = cli.order {
        cfg.pipeline.order = o;
    }
    if let Some(t) = cli.tol {
        cfg.pipeline.tol = t;
    }
    let mode = cli.mode.or(cfg.mode).unwrap_or_default();
    let out = cli.out.clone().or(cfg.out.clone());
    let csv_path = cli.csv.clone().or(cfg.csv.clone());
    let out = out.as_deref();
    match &cli.command {
        Command::Series(SeriesCmd::Eval { input, z }) => {
            let doc: LpsJson = read_json(input)?;
            let z = parse_complex(z)?;
            let (value, tail) = match mode {
                Mode::Exact => LogPowerSeries::<GaussRational>::from_json(&doc)?.eval(z)?,
                Mode::Float => LogPowerSeries::<Complex64>::from_json(&doc)?.eval(z)?,
            };
            emit(&EvalReport { value, tail }, out)?;
            Ok(true)
        }
        Command::Fuchsian(FuchsianCmd::Solve { input }) => {
            let doc: SystemJson = read_json(input)?;
            let order = cli.order.unwrap_or(doc.coeffs.len().saturating_sub(1).max(1));
            let res = match mode {
                Mode::Exact => solve_system::<GaussRational>(&doc, order, out)?,
                Mode::Float => solve_system::<Complex64>(&doc, order, out)?,
            };
            eprintln!("residual {res:.3e}");
            Ok(true)
        }
        Command::Reduce(a) => {
            let mods = modules(&a.modules, &cfg)?;
            let n = a.n.unwrap_or(cfg.pipeline.n);
            let q: QuadrupleJson = read_json(&a.quadruple)?;
            let norm = Normalization::parse(&a.flavor)?;
            let chain = match a.chain.to_ascii_lowercase().as_str() {
                "a" => Chain::A,
                "b" => Chain::B,
                other => return Err(Error::Parse(format!("unknown chain '{other}'"))),
            };
            let quad = q.build(&mods);
            let red = Reducer::new(mods, n);
            let r = red.reduce_to_basis(&quad, norm, chain)?;
            if let Some(p) = &csv_path {
                let rows: Vec<ReduceRow> = r
                    .combination
                    .terms
                    .iter()
                    .map(|((q, _, _), c)| ReduceRow {
                        theta: format!("{:?}", q.theta),
                        v: format!("{:?}", q.v),
                        u: format!("{:?}", q.u),
                        w: format!("{:?}", q.w),
                        coefficient: c.to_string(),
                    })
                    .collect();
                write_csv(&rows, p)?;
            }
            emit(&r.combination.to_json(), out)?;
            Ok(true)
        }
        Command::ConnectionMatrix(a) => {
            let mods = modules(&a.modules, &cfg)?;
            let norm = Normalization::parse(&a.flavor)?;
            let n = a.n.unwrap_or(cfg.pipeline.n);
            let default_base = if norm == Normalization::Y { "7" } else { "4" };
            let base = a.basepoint.as_deref().unwrap_or(default_base);
            let opts = ConnectionOptions { n, order: cfg.pipeline.order, tilde: cfg.pipeline.tilde, dual_basis: None };
            let red = Reducer::new(mods, n);
            let sym = symbolic_connection(&red, norm, &opts)?;
            let doc = match mode {
                Mode::Exact => sym.expand(parse_gauss(base)?, opts.order)?.series.to_json(),
                Mode::Float => sym.expand(parse_complex(base)?, opts.order)?.series.to_json(),
            };
            emit(&doc, out)?;
            Ok(true)
        }
        Command::AssocCheck(a) => {
            if mode == Mode::Exact {
                return Err(Error::Invalid("assoc-check evaluates at points and runs in float mode".into()));
            }
            let momenta: [Q; 3] = parse_momenta(&match (&a.momenta, &cfg.momenta) {
                (Some(m), _) => split_list(m),
                (None, Some(m)) => m.clone(),
                (None, None) => split_list("1,1,1"),
            })?;
            let mut pipeline = cfg.pipeline.clone();
            if let Some(g) = a.g_max {
                pipeline.g_max = g;
            }
            if let Some(n) = a.n {
                pipeline.n = n;
            }
            let points: Vec<(Complex64, Complex64)> = match (&a.points, &cfg.points) {
                (Some(p), _) => read_json::<Vec<PointSpec>>(p)?.iter().map(PointSpec::get).collect(),
                (None, Some(ps)) => ps.iter().map(PointSpec::get).collect(),
                (None, None) => sample_points(
                    a.seed.or(cfg.seed).unwrap_or(7),
                    a.count.or(cfg.count).unwrap_or(20),
                    (Complex64::new(7.0, 0.0), Complex64::new(4.0, 0.0)),
                    cfg.radius.unwrap_or(0.5),
                ),
            };
            if points.is_empty() {
                return Err(Error::Parse(
                    "empty points list; usage: fusion assoc-check --momenta a,b,c --points points.json".into(),
                ));
            }
            let report = check_associativity(&momenta, &points, &pipeline)?;
            if let Some(p) = &csv_path {
                let rows: Vec<PointRow> = report
                    .points
                    .iter()
                    .map(|p| PointRow {
                        x_re: p.x.re,
                        x_im: p.x.im,
                        y_re: p.y.re,
                        y_im: p.y.im,
                        a_bc_re: p.a_bc.re,
                        a_bc_im: p.a_bc.im,
                        ab_c_re: p.ab_c.re,
                        ab_c_im: p.ab_c.im,
                        closed_form_re: p.closed_form.re,
                        closed_form_im: p.closed_form.im,
                        deviation: p.deviation,
                        closed_form_deviation: p.closed_form_deviation,
                        tail_a: p.tail_a,
                        tail_b: p.tail_b,
                    })
                    .collect();
                write_csv(&rows, p)?;
            }
            emit(&report, out)?;
            Ok(report.passed)
        }
        Command::PentagonCheck(a) => {
            if mode == Mode::Exact {
                return Err(Error::Invalid("pentagon-check evaluates at points and runs in float mode".into()));
            }
            let momenta: [Q; 4] = parse_momenta(&match (&a.momenta, &cfg.momenta) {
                (Some(m), _) => split_list(m),
                (None, Some(m)) => m.clone(),
                (None, None) => split_list("1,1,1,1"),
            })?;
            let point: Vec<Complex64> = match (&a.point, &cfg.point) {
                (Some(p), _) => split_list(p)
                    .iter()
                    .map(|t| t.parse::<f64>().map(|v| Complex64::new(v, 0.0)))
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Parse(format!("bad point '{p}'")))?,
                (None, Some(p)) => p.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
                (None, None) => vec![Complex64::new(7.0, 0.0), Complex64::new(6.0, 0.0), Complex64::new(4.0, 0.0)],
            };
            let [x, y, z]: [Complex64; 3] =
                point.try_into().map_err(|_| Error::Parse("a pentagon point has three coordinates".into()))?;
            let tol = cli.tol.unwrap_or(1e-5);
            let max_grade = a.max_grade.or(cfg.max_grade).unwrap_or(8);
            let report = check_pentagon(&momenta, (x, y, z), max_grade, tol)?;
            if let Some(p) = &csv_path {
                let rows: Vec<BracketRow> = report
                    .values
                    .iter()
                    .map(|v| BracketRow {
                        bracketing: v.bracketing.name(),
                        value_re: v.value.re,
                        value_im: v.value.im,
                        tail: v.tail,
                    })
                    .collect();
                write_csv(&rows, p)?;
            }
            emit(&report, out)?;
            Ok(report.passed)
        }
    }
}

fn solve_system<S: Scalar>(doc: &SystemJson, order: usize, out: Option<&Path>) -> Result<f64> {
    let a = MatrixSeries::<S>::from_json(doc)?;
    let sol = fuchsian_solve(&a, &SolveOptions::with_order(order))?;
    emit(&sol.to_json(), out)?;
    Ok(residual(&a, &sol))
}
