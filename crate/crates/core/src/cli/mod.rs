//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 domain or verification failure, 2 usage or parse
//! error. Data files carry no run metadata; that goes to `<out>.meta.json`.

mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use config::{Checkpoints, ExperimentConfig, FitWindow, VerifyParams};

use crate::analysis::{self, FitMode, LemmaReport};
use crate::diffeo::DiffeoSpec;
use crate::error::Error;
use crate::families::FamilyDescriptor;
use crate::fixed_points;
use crate::orbit::{self, GrowthCurve, GrowthOptions};

pub const WORKERS_ENV: &str = "GROWTHLAB_WORKERS";
pub const CSV_HEADER: [&str; 6] = ["n", "log_gamma", "log_max_fwd", "log_min_fwd", "argmax_start", "argmin_start"];

#[derive(Debug, Parser)]
#[command(name = "growthlab", version, about = "Growth sequences of iterated interval diffeomorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check endpoint fixing, monotonicity and the sign of f'.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Probe count.
        #[arg(long, default_value_t = 1000)]
        grid: usize,
    },
    /// Write the growth sequence as CSV.
    Growth {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        nmax: Option<u64>,
        /// Comma-separated list or logspaced:K.
        #[arg(long)]
        checkpoints: Option<Checkpoints>,
    },
    /// Locate and classify fixed points.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = fixed_points::DEFAULT_GRID)]
        grid: usize,
    },
    /// Least-squares exponent fit of a growth CSV.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Growth CSV; defaults to the config's output path.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModeArg::Power)]
        mode: ModeArg,
        /// Window LO:HI in iterations.
        #[arg(long)]
        window: Option<String>,
    },
    /// Run one lemma check and print its report.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        lemma: LemmaId,
    },
    /// List the family kinds and a sample descriptor for each.
    FamilyList,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Power,
    ExpRate,
    Loglog,
}

impl From<ModeArg> for FitMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Power => FitMode::Power,
            ModeArg::ExpRate => FitMode::ExpRate,
            ModeArg::Loglog => FitMode::Loglog,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum LemmaId {
    Pr1,
    Pr2,
    Pr3,
    L4,
    Prn,
    Flow,
    Eq39,
    Eq741,
    L6,
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
    fn domain(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Argument(_) => Failure::usage(e.to_string()),
            _ => Failure::domain(e.to_string()),
        }
    }
}

type CliResult = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let workers = match worker_count() {
        Ok(w) => w,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    };
    match with_workers(workers, || dispatch(cli.command)) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn worker_count() -> Result<Option<usize>, Failure> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::usage(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

#[cfg(feature = "parallel")]
fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match workers {
        None => f(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn with_workers<R: Send>(_workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    f()
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Validate { common, grid } => cmd_validate(&common, grid),
        Command::Growth { common, grid, nmax, checkpoints } => cmd_growth(&common, grid, nmax, checkpoints),
        Command::Classify { common, grid } => cmd_classify(&common, grid),
        Command::Fit { common, input, mode, window } => cmd_fit(&common, input, mode.into(), window),
        Command::Verify { common, lemma } => cmd_verify(&common, lemma),
        Command::FamilyList => cmd_family_list(),
    }
}

fn load_config(common: &Common) -> Result<ExperimentConfig, Failure> {
    match &common.config {
        Some(p) => ExperimentConfig::load(p).map_err(Failure::usage),
        None => Ok(ExperimentConfig::default()),
    }
}

fn family_of(cfg: &ExperimentConfig) -> Result<&FamilyDescriptor, Failure> {
    cfg.family.as_ref().ok_or_else(|| Failure::usage("config has no \"family\" entry"))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::domain(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::domain(format!("cannot write to stdout: {e}")))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::domain(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn cmd_validate(common: &Common, grid: usize) -> CliResult {
    let cfg = load_config(common)?;
    let spec = family_of(&cfg)?.build_unchecked()?;
    let report = spec.validate(grid);
    emit(common.out.as_deref(), &to_json(&report)?)?;
    Ok(if report.ok() { 0 } else { 1 })
}

/// Growth curve for a config; the library call behind `growth`.
pub fn growth_for_config(cfg: &ExperimentConfig) -> crate::Result<GrowthCurve> {
    let desc = cfg.family.as_ref().ok_or_else(|| Error::Argument("config has no family".into()))?;
    let spec = desc.build()?;
    let cps = cfg.checkpoints.resolve(cfg.n_max);
    let options = GrowthOptions {
        grid_size: cfg.grid_size,
        refinement_rounds: cfg.refinement_rounds,
        ..GrowthOptions::default()
    };
    orbit::growth_sequence_with(&spec, cfg.n_max, &cps, &options)
}

/// CSV rendering with a header row, LF endings and 17 significant digits.
pub fn curve_to_csv(curve: &GrowthCurve) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in &curve.records {
        w.write_record([
            r.n.to_string(),
            format!("{:.16e}", r.log_gamma),
            format!("{:.16e}", r.log_max_fwd),
            format!("{:.16e}", r.log_min_fwd),
            format!("{:.16e}", r.argmax_start),
            format!("{:.16e}", r.argmin_start),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// `(n, log_gamma)` columns of a growth CSV.
pub fn read_growth_csv(path: &Path) -> Result<(Vec<u64>, Vec<f64>), String> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(format!("{} is not a growth CSV (header {:?})", path.display(), headers));
    }
    let mut ns = Vec::new();
    let mut gs = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| e.to_string())?;
        ns.push(row[0].parse::<u64>().map_err(|e| format!("bad n {:?}: {e}", &row[0]))?);
        gs.push(row[1].parse::<f64>().map_err(|e| format!("bad log_gamma {:?}: {e}", &row[1]))?);
    }
    Ok((ns, gs))
}

#[derive(Serialize)]
struct GrowthMeta<'a> {
    tool: &'static str,
    version: &'static str,
    family: Option<&'a FamilyDescriptor>,
    n_max: u64,
    grid_size: usize,
    refinement_rounds: u32,
    checkpoints: usize,
    parallel: bool,
    workers: Option<usize>,
    elapsed_seconds: f64,
    fits: Vec<serde_json::Value>,
}

fn cmd_growth(common: &Common, grid: Option<usize>, nmax: Option<u64>, checkpoints: Option<Checkpoints>) -> CliResult {
    let mut cfg = load_config(common)?;
    family_of(&cfg)?;
    if let Some(g) = grid {
        cfg.grid_size = g;
    }
    if let Some(n) = nmax {
        cfg.n_max = n;
    }
    if let Some(c) = checkpoints {
        cfg.checkpoints = c;
    }
    let started = Instant::now();
    let curve = growth_for_config(&cfg)?;
    let csv_text = curve_to_csv(&curve);
    let out = common.out.clone().or_else(|| cfg.output.clone());
    emit(out.as_deref(), &csv_text)?;
    if let Some(path) = out {
        let fits = cfg
            .fit_windows
            .iter()
            .map(|w| match analysis::fit_exponent(&curve, w.mode, w.window) {
                Ok(f) => serde_json::to_value(f).unwrap_or(serde_json::Value::Null),
                Err(e) => serde_json::json!({ "mode": w.mode, "window": w.window, "error": e.to_string() }),
            })
            .collect();
        let meta = GrowthMeta {
            tool: "growthlab",
            version: env!("CARGO_PKG_VERSION"),
            family: cfg.family.as_ref(),
            n_max: cfg.n_max,
            grid_size: cfg.grid_size,
            refinement_rounds: cfg.refinement_rounds,
            checkpoints: curve.checkpoints.len(),
            parallel: cfg!(feature = "parallel"),
            workers: worker_count().ok().flatten(),
            elapsed_seconds: started.elapsed().as_secs_f64(),
            fits,
        };
        let mut meta_path = path.into_os_string();
        meta_path.push(".meta.json");
        emit(Some(Path::new(&meta_path)), &to_json(&meta)?)?;
    }
    Ok(0)
}

fn cmd_classify(common: &Common, grid: usize) -> CliResult {
    let cfg = load_config(common)?;
    let spec = family_of(&cfg)?.build()?;
    let report = fixed_points::fixed_point_report(&spec, grid)?;
    emit(common.out.as_deref(), &to_json(&report)?)?;
    Ok(0)
}

fn parse_window(s: &str) -> Result<(u64, u64), Failure> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| Failure::usage(format!("window must be LO:HI, got {s:?}")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v >= 0.0)
            .map(|v| v.round() as u64)
            .ok_or_else(|| Failure::usage(format!("bad window bound {t:?}")))
    };
    Ok((parse(lo)?, parse(hi)?))
}

fn cmd_fit(common: &Common, input: Option<PathBuf>, mode: FitMode, window: Option<String>) -> CliResult {
    let cfg = load_config(common)?;
    let path = input
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| Failure::usage("fit needs --input or a config with an output path"))?;
    let (ns, gs) = read_growth_csv(&path).map_err(Failure::usage)?;
    let window = match window {
        Some(w) => parse_window(&w)?,
        None => cfg
            .fit_windows
            .iter()
            .find(|w| w.mode == mode)
            .map(|w| w.window)
            .unwrap_or((ns.first().copied().unwrap_or(1), ns.last().copied().unwrap_or(1))),
    };
    let fit = analysis::fit_points(&ns, &gs, mode, window).map_err(|e| Failure::domain(e.to_string()))?;
    emit(common.out.as_deref(), &to_json(&fit)?)?;
    Ok(0)
}

fn build_family(cfg: &ExperimentConfig) -> Result<DiffeoSpec, Failure> {
    Ok(family_of(cfg)?.build()?)
}

fn run_lemma(lemma: LemmaId, cfg: &ExperimentConfig) -> Result<LemmaReport, Failure> {
    let v = &cfg.verify;
    let report = match lemma {
        LemmaId::Pr1 => {
            let spec = build_family(cfg)?;
            let x1 = v.x1.unwrap_or(0.01);
            let interval = v.interval.unwrap_or((0.0, 1.0));
            match (v.n, &v.ns) {
                (Some(n), None) => analysis::verify_lemma_pr1(&spec, interval, x1, n)?,
                (_, ns) => {
                    let ns = ns.clone().unwrap_or_else(|| vec![100, 1000, 10_000]);
                    analysis::verify_lemma_pr1_ladder(&spec, interval, x1, &ns)?
                }
            }
        }
        LemmaId::Pr2 => analysis::verify_lemma_pr2(&build_family(cfg)?, v.x.unwrap_or(0.25), v.delta.unwrap_or(1.0))?,
        LemmaId::Pr3 => analysis::verify_lemma_pr3(&build_family(cfg)?, v.x1.unwrap_or(0.1), v.n.unwrap_or(100))?,
        LemmaId::L4 => {
            let spec = build_family(cfg)?;
            let j = v.interval.unwrap_or((0.4, 0.45));
            let pairs = v.pair_samples.unwrap_or(64);
            let alpha = v.alpha.unwrap_or(0.5);
            match &v.ns {
                Some(ns) => analysis::verify_lemma_l4_ladder(&spec, j, ns, pairs, alpha)?,
                None => analysis::verify_lemma_l4(&spec, j, v.n.unwrap_or(10_000), pairs, alpha)?,
            }
        }
        LemmaId::Prn => {
            let spec = build_family(cfg)?;
            let big_n = u32::try_from(v.big_n.unwrap_or(2)).map_err(|_| Failure::usage("N too large"))?;
            match (v.x, &v.xs) {
                (Some(x), None) => analysis::verify_bounded_oscillation(&spec, big_n, x)?,
                (_, xs) => {
                    let xs = xs.clone().unwrap_or_else(|| (3..=20).map(|j| 0.5f64.powi(j)).collect());
                    analysis::verify_bounded_oscillation_ladder(&spec, big_n, &xs)?
                }
            }
        }
        LemmaId::Flow => analysis::verify_flow_identity(&build_family(cfg)?, v.x.unwrap_or(0.3), v.n.unwrap_or(10))?,
        LemmaId::Eq39 => analysis::verify_eq39(v.alpha.unwrap_or(0.3), v.beta.unwrap_or(0.5), v.big_n.unwrap_or(10_000))?,
        LemmaId::Eq741 => analysis::verify_eq741(v.alpha.unwrap_or(0.3), v.beta.unwrap_or(0.5), v.k.unwrap_or(1000))?,
        LemmaId::L6 => {
            let alpha = v.alpha.unwrap_or(0.5);
            let p = v.p.unwrap_or(1.0);
            analysis::verify_lemma_l6(alpha, p, v.b.unwrap_or((p + 1.0) * alpha), v.grid.unwrap_or(1000))?
        }
    };
    Ok(report)
}

fn cmd_verify(common: &Common, lemma: LemmaId) -> CliResult {
    let cfg = load_config(common)?;
    let report = run_lemma(lemma, &cfg)?;
    emit(common.out.as_deref(), &to_json(&report)?)?;
    Ok(if report.ok() { 0 } else { 1 })
}

fn cmd_family_list() -> CliResult {
    let samples = [
        FamilyDescriptor::Identity,
        FamilyDescriptor::Hyperbolic { c: 0.5 },
        FamilyDescriptor::PolynomialFlat { k: 2, c: Some(1.0), c_fraction: None },
        FamilyDescriptor::ConjugatedTranslation { c: 1.0 },
        FamilyDescriptor::FlatBumpThm2 { bumps: 4, c_fill: None },
        FamilyDescriptor::HoelderThm3b {
            alpha: 0.5,
            pieces: vec![crate::families::HoelderPieceDescriptor { beta: 0.5, a: 0.0, b: 1.0, scale: Some(0.2) }],
        },
        FamilyDescriptor::FlatExp { c: 0.1 },
        FamilyDescriptor::Flow { base: Box::new(FamilyDescriptor::FlatExp { c: 0.1 }), t: 1.0, step_tol: 1e-10 },
        FamilyDescriptor::BarPhi { alpha: 0.3, beta: 0.5 },
    ];
    let mut text = String::new();
    for d in &samples {
        let json = serde_json::to_string(d).map_err(|e| Failure::domain(e.to_string()))?;
        let _ = writeln!(text, "{json}");
    }
    emit(None, &text)?;
    Ok(0)
}
