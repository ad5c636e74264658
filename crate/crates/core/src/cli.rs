//! Command-line front end. The `xformtest` binary is a thin wrapper around
//! [`run`].
//!
//! Exit codes: 0 success (a rejection is still a success), 1 other
//! failure, 2 bad flags or unreadable input, 3 degenerate evaluation point,
//! 4 reference samples that do not overlap.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{grid_svg, run_pipeline, write_grid_csv, AnalysisInputs, AnalysisReport, DEFAULT_GRID_POINTS};
use crate::distributions::{normal_sample, StdNormal};
use crate::empirical::{KnownCdf, PiecewiseLinearCdf, Sample};
use crate::error::Error;
use crate::kde::SmoothingSchedule;
use crate::montecarlo::{
    run_scenarios, run_table1, run_table3, run_table4, LocalBase, ScenarioConfig, SimulationOptions, SimulationReport,
    Statistic, TransformSpec, DEFAULT_BETAS,
};
use crate::rng::substream;
use crate::testing::{t1_statistic, t2_statistic, training_cdfs, Case1Inputs, Case2Inputs, TestResult};

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_NO_OVERLAP: i32 = 4;

/// Environment fallback for `--threads`.
pub const THREADS_ENV: &str = "XFORMTEST_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "xformtest",
    version,
    about = "Pointwise tests for equality of two monotone transformations"
)]
pub struct Cli {
    /// Column to read from CSV inputs with a header (name or 1-based
    /// index). A `FILE#COLUMN` suffix overrides it per file.
    #[arg(long, global = true)]
    pub column: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// T1: known reference distribution.
    TestCase1(Case1Cmd),
    /// T2: reference distributions estimated from training samples.
    TestCase2(Case2Cmd),
    /// Monte Carlo level and power tables.
    Simulate(SimulateCmd),
    /// Estimator grid, linear fits and moment predictions.
    Analyze(AnalyzeCmd),
}

#[derive(Debug, Clone, Args)]
pub struct ScheduleArgs {
    /// Bandwidth `h = n^-c1`.
    #[arg(long, default_value_t = 0.5)]
    pub bandwidth_exponent: f64,
    /// Trim floor `e = n^-c2`.
    #[arg(long, default_value_t = 0.2)]
    pub trim_exponent: f64,
    /// Smoothness order used only by the rate-condition warning.
    #[arg(long, default_value_t = 2)]
    pub smoothness: u32,
}

impl ScheduleArgs {
    fn schedule(&self) -> Result<SmoothingSchedule, CliError> {
        Ok(SmoothingSchedule::new(
            self.bandwidth_exponent,
            self.trim_exponent,
            self.smoothness,
        )?)
    }

    fn flags(&self, m: &mut BTreeMap<String, Value>) {
        m.insert("bandwidth_exponent".into(), json!(self.bandwidth_exponent));
        m.insert("trim_exponent".into(), json!(self.trim_exponent));
        m.insert("smoothness".into(), json!(self.smoothness));
    }
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    /// Evaluation point, or `random` for a N(0, 1) draw.
    #[arg(long, default_value = "random")]
    pub y: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Seed for `--y random`.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Write the JSON result here (and the manifest next to it) instead of
    /// stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
}

#[derive(Debug, Args)]
pub struct Case1Cmd {
    pub x: String,
    pub x_tilde: String,
    /// `normal` or `table:FILE` (CSV of `p,x` pairs from p = 0 to p = 1).
    #[arg(long, default_value = "normal")]
    pub reference: String,
    /// Reference of the tilde signal; defaults to `--reference`.
    #[arg(long)]
    pub reference_tilde: Option<String>,
    #[command(flatten)]
    pub common: TestArgs,
}

#[derive(Debug, Args)]
pub struct Case2Cmd {
    pub x: String,
    #[arg(id = "y_sample", value_name = "Y")]
    pub y: String,
    pub x_tilde: String,
    pub y_tilde: String,
    #[command(flatten)]
    pub common: TestArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableChoice {
    #[value(name = "1")]
    Levels,
    #[value(name = "3")]
    Powers,
    #[value(name = "4")]
    Local,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatChoice {
    T1,
    T2,
    Both,
}

#[derive(Debug, Args)]
pub struct SimulateCmd {
    #[arg(long, value_enum)]
    pub table: TableChoice,
    #[arg(long, default_value_t = 10_000)]
    pub reps: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 500])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Output prefix: writes PREFIX.csv, PREFIX.json and
    /// PREFIX.manifest.json. Without it the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exponents of the local alternative (table 4).
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_BETAS)]
    pub betas: Vec<f64>,
    /// Local alternative shrinks with `n^beta` (`n`) or `m^beta` (`m`).
    #[arg(long, default_value = "n", value_parser = ["n", "m"])]
    pub local_base: String,
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
    /// Transform of the untilded signal for `--table custom`.
    #[arg(long, default_value = "null")]
    pub g: String,
    /// Transform of the tilde signal for `--table custom`: `null`, `g1`..`g4`,
    /// `g5:BETA` or `affine:SLOPE,INTERCEPT`.
    #[arg(long)]
    pub g_tilde: Option<String>,
    #[arg(long, value_enum, default_value_t = StatChoice::Both)]
    pub statistic: StatChoice,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeCmd {
    pub x: String,
    pub y: String,
    pub x_tilde: String,
    pub y_tilde: String,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// OLS window `LO,HI` in observation units.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [100.0, 200.0])]
    pub window: Vec<f64>,
    /// Writes PREFIX_grid.csv, PREFIX_fits.json, PREFIX_grid.svg and
    /// PREFIX.manifest.json.
    #[arg(long)]
    pub out_prefix: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {msg}")]
    Input { path: String, msg: String },
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } => EXIT_USAGE,
            CliError::Lib(Error::DegeneratePoint { .. }) => EXIT_DEGENERATE,
            CliError::Lib(Error::NoOverlap { .. }) => EXIT_NO_OVERLAP,
            CliError::Lib(
                Error::EmptySample | Error::NonFinite { .. } | Error::InvalidConfig(_) | Error::Domain { .. },
            ) => EXIT_USAGE,
            _ => EXIT_OTHER,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

/// Digest of one input file.
#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub column: Option<String>,
    pub rows: usize,
    pub sha256: String,
}

/// Provenance record written next to every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub flags: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    /// Anything resolved at run time, such as a drawn evaluation point.
    pub resolved: BTreeMap<String, Value>,
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

impl RunManifest {
    fn start(command: &str, seed: Option<u64>) -> Self {
        Self {
            command: command.into(),
            flags: BTreeMap::new(),
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            inputs: Vec::new(),
            started_unix_ms: now_ms(),
            finished_unix_ms: 0,
            resolved: BTreeMap::new(),
        }
    }

    fn finish(mut self, path: Option<&Path>) -> Result<(), CliError> {
        self.finished_unix_ms = now_ms();
        let text = serde_json::to_string_pretty(&self)? + "\n";
        match path {
            Some(p) => fs::write(p, text)?,
            None => io::stderr().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

/// Parsed numeric column with its digest.
pub struct Column {
    pub values: Vec<f64>,
    pub digest: InputDigest,
}

/// Splits `FILE#COLUMN`.
fn split_spec<'a>(spec: &'a str, default: Option<&'a str>) -> (&'a str, Option<&'a str>) {
    match spec.rsplit_once('#') {
        Some((file, col)) if !col.is_empty() => (file, Some(col)),
        _ => (spec, default),
    }
}

/// Reads one numeric column.
///
/// A file whose first non-empty line parses as a number is read as one
/// value per line. Otherwise the first line is a header and `column`
/// selects a field by name or 1-based index; it may be omitted when there
/// is a single field.
pub fn read_column(spec: &str, default_column: Option<&str>) -> Result<Column, CliError> {
    let (path, column) = split_spec(spec, default_column);
    let bytes = fs::read(path).map_err(|e| CliError::Input {
        path: path.into(),
        msg: e.to_string(),
    })?;
    let bad = |msg: String| CliError::Input { path: path.into(), msg };
    let text = std::str::from_utf8(&bytes).map_err(|e| bad(e.to_string()))?;
    let first = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| bad("file is empty".into()))?;
    let headerless = first.split(',').next().is_some_and(|f| f.trim().parse::<f64>().is_ok());

    let mut values = Vec::new();
    if headerless {
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let v: f64 = t
                .parse()
                .map_err(|_| bad(format!("line {}: not a single number: {t:?}", i + 1)))?;
            values.push(v);
        }
    } else {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
        let idx = match column {
            Some(c) => headers
                .iter()
                .position(|h| h == c)
                .or_else(|| {
                    c.parse::<usize>()
                        .ok()
                        .filter(|&k| k >= 1 && k <= headers.len())
                        .map(|k| k - 1)
                })
                .ok_or_else(|| bad(format!("no column {c:?}")))?,
            None if headers.len() == 1 => 0,
            None => {
                return Err(bad(format!(
                    "{} columns; choose one with --column or FILE#COLUMN",
                    headers.len()
                )))
            }
        };
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let cell = rec.get(idx).unwrap_or("");
            let v: f64 = cell
                .parse()
                .map_err(|_| bad(format!("row {}: not a number: {cell:?}", i + 2)))?;
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err(bad("no values".into()));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(bad(format!("value {} is not finite", i + 1)));
    }
    let digest = InputDigest {
        path: path.into(),
        column: column.map(str::to_string),
        rows: values.len(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    Ok(Column { values, digest })
}

fn load(spec: &str, cli: &Cli, manifest: &mut RunManifest) -> Result<Sample, CliError> {
    let col = read_column(spec, cli.column.as_deref())?;
    manifest.inputs.push(col.digest);
    Ok(Sample::new(col.values)?)
}

fn reference(spec: &str, manifest: &mut RunManifest) -> Result<Box<dyn KnownCdf>, CliError> {
    if spec == "normal" {
        return Ok(Box::new(StdNormal));
    }
    let Some(file) = spec.strip_prefix("table:") else {
        return Err(CliError::Usage(format!(
            "unknown reference {spec:?}; use normal or table:FILE"
        )));
    };
    let bad = |msg: String| CliError::Input { path: file.into(), msg };
    let bytes = fs::read(file).map_err(|e| bad(e.to_string()))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let mut table = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let (Some(p), Some(x)) = (rec.get(0), rec.get(1)) else {
            return Err(bad("expected p,x rows".into()));
        };
        match (p.parse::<f64>(), x.parse::<f64>()) {
            (Ok(p), Ok(x)) => table.push((p, x)),
            // tolerate a header row
            _ if table.is_empty() => {}
            _ => return Err(bad(format!("not numeric: {p:?},{x:?}"))),
        }
    }
    let cdf = PiecewiseLinearCdf::from_quantile_table(&table).map_err(|e| bad(e.to_string()))?;
    manifest.inputs.push(InputDigest {
        path: file.into(),
        column: None,
        rows: table.len(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    });
    Ok(Box::new(cdf))
}

fn eval_point(args: &TestArgs, manifest: &mut RunManifest) -> Result<f64, CliError> {
    let y = if args.y == "random" {
        normal_sample(&mut substream(args.seed, 0))
    } else {
        args.y
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CliError::Usage(format!("--y must be a number or random, got {:?}", args.y)))?
    };
    manifest.resolved.insert("y".into(), json!(y));
    Ok(y)
}

fn test_flags(args: &TestArgs, m: &mut BTreeMap<String, Value>) {
    m.insert("y".into(), json!(args.y));
    m.insert("alpha".into(), json!(args.alpha));
    args.schedule.flags(m);
}

fn warn_rate_condition(s: &SmoothingSchedule) {
    if !s.satisfies_rate_condition() {
        eprintln!(
            "note: exponents c1={} c2={} do not satisfy c2/k < c1 < 1/(1+2k) for k={}",
            s.c1, s.c2, s.k
        );
    }
}

fn emit_result(result: &TestResult, out: Option<&Path>, manifest: RunManifest) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(result)? + "\n";
    match out {
        Some(p) => {
            fs::write(p, &text)?;
            manifest.finish(Some(&manifest_path(p)))
        }
        None => {
            io::stdout().write_all(text.as_bytes())?;
            manifest.finish(None)
        }
    }
}

/// `out.json` -> `out.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.manifest.json"))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_test_case1(cli: &Cli, c: &Case1Cmd) -> Result<(), CliError> {
    let mut manifest = RunManifest::start("test-case1", Some(c.common.seed));
    test_flags(&c.common, &mut manifest.flags);
    manifest.flags.insert("reference".into(), json!(c.reference));
    let ref_t = c.reference_tilde.clone().unwrap_or_else(|| c.reference.clone());
    manifest.flags.insert("reference_tilde".into(), json!(ref_t));
    let schedule = c.common.schedule.schedule()?;
    warn_rate_condition(&schedule);

    let x = load(&c.x, cli, &mut manifest)?.into_sorted();
    let xt = load(&c.x_tilde, cli, &mut manifest)?.into_sorted();
    let f = reference(&c.reference, &mut manifest)?;
    let ft = reference(&ref_t, &mut manifest)?;
    let y = eval_point(&c.common, &mut manifest)?;
    let inputs = Case1Inputs {
        x: &x,
        x_tilde: &xt,
        f_y: f.as_ref(),
        f_y_tilde: ft.as_ref(),
        schedule,
        y,
    };
    let result = t1_statistic(&inputs, c.common.alpha)?;
    emit_result(&result, c.common.out.as_deref(), manifest)
}

fn cmd_test_case2(cli: &Cli, c: &Case2Cmd) -> Result<(), CliError> {
    let mut manifest = RunManifest::start("test-case2", Some(c.common.seed));
    test_flags(&c.common, &mut manifest.flags);
    let schedule = c.common.schedule.schedule()?;
    warn_rate_condition(&schedule);

    let x = load(&c.x, cli, &mut manifest)?.into_sorted();
    let ys = load(&c.y, cli, &mut manifest)?;
    let xt = load(&c.x_tilde, cli, &mut manifest)?.into_sorted();
    let yts = load(&c.y_tilde, cli, &mut manifest)?;
    let (f, ft) = training_cdfs(&ys, &yts);
    let y = eval_point(&c.common, &mut manifest)?;
    let inputs = Case2Inputs {
        x: &x,
        x_tilde: &xt,
        f_y_hat: &f,
        f_y_tilde_hat: &ft,
        schedule,
        y,
    };
    let result = t2_statistic(&inputs, c.common.alpha)?;
    emit_result(&result, c.common.out.as_deref(), manifest)
}

/// Parses `null`, `g1`..`g4`, `g5:BETA` or `affine:SLOPE,INTERCEPT`.
pub fn parse_transform(s: &str, base: LocalBase) -> Result<TransformSpec, CliError> {
    let bad = || CliError::Usage(format!("unknown transform {s:?}"));
    Ok(match s {
        "null" | "g" => TransformSpec::NullExp,
        "g1" => TransformSpec::ShiftExp,
        "g2" => TransformSpec::ScaleExp,
        "g3" => TransformSpec::NegRatio,
        "g4" => TransformSpec::Affine {
            slope: 4.0,
            intercept: 5.0,
        },
        _ => {
            if let Some(b) = s.strip_prefix("g5:") {
                TransformSpec::LocalShift {
                    beta: b.parse().map_err(|_| bad())?,
                    base,
                }
            } else if let Some(rest) = s.strip_prefix("affine:") {
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                TransformSpec::Affine {
                    slope: a.parse().map_err(|_| bad())?,
                    intercept: b.parse().map_err(|_| bad())?,
                }
            } else {
                return Err(bad());
            }
        }
    })
}

fn cmd_simulate(c: &SimulateCmd) -> Result<(), CliError> {
    let mut manifest = RunManifest::start("simulate", Some(c.seed));
    let base = if c.local_base == "m" {
        LocalBase::EffectiveSize
    } else {
        LocalBase::SampleSize
    };
    let table = match c.table {
        TableChoice::Levels => "1",
        TableChoice::Powers => "3",
        TableChoice::Local => "4",
        TableChoice::Custom => "custom",
    };
    {
        let f = &mut manifest.flags;
        f.insert("table".into(), json!(table));
        f.insert("reps".into(), json!(c.reps));
        f.insert("sizes".into(), json!(c.sizes));
        f.insert("alpha".into(), json!(c.alpha));
        f.insert("betas".into(), json!(c.betas));
        f.insert("local_base".into(), json!(c.local_base));
        f.insert("threads".into(), json!(c.threads));
        if c.table == TableChoice::Custom {
            f.insert("g".into(), json!(c.g));
            f.insert("g_tilde".into(), json!(c.g_tilde));
            f.insert("statistic".into(), json!(format!("{:?}", c.statistic)));
        }
        c.schedule.flags(f);
    }
    if c.sizes.is_empty() {
        return Err(CliError::Usage("--sizes needs at least one value".into()));
    }
    let opts = SimulationOptions {
        seed: c.seed,
        replications: c.reps,
        sizes: c.sizes.clone(),
        alpha: c.alpha,
        schedule: c.schedule.schedule()?,
        threads: c.threads,
        local_base: base,
    };
    let report: SimulationReport = match c.table {
        TableChoice::Levels => run_table1(&opts)?,
        TableChoice::Powers => run_table3(&opts)?,
        TableChoice::Local => run_table4(&opts, &c.betas)?,
        TableChoice::Custom => {
            let g = parse_transform(&c.g, base)?;
            let gt_spec = c
                .g_tilde
                .as_deref()
                .ok_or_else(|| CliError::Usage("--table custom needs --g-tilde".into()))?;
            let gt = parse_transform(gt_spec, base)?;
            let stats: &[Statistic] = match c.statistic {
                StatChoice::T1 => &[Statistic::T1],
                StatChoice::T2 => &[Statistic::T2],
                StatChoice::Both => &[Statistic::T1, Statistic::T2],
            };
            let mut scenarios = Vec::new();
            for &stat in stats {
                for &n in &c.sizes {
                    let mut cfg = ScenarioConfig::new(stat, gt.clone(), n, c.reps, c.seed);
                    cfg.g = g.clone();
                    cfg.alpha = c.alpha;
                    cfg.schedule = opts.schedule;
                    scenarios.push(cfg);
                }
            }
            run_scenarios("custom", &opts, &scenarios)?
        }
    };
    manifest
        .resolved
        .insert("wall_clock_secs".into(), json!(report.wall_clock_secs));

    match &c.out {
        Some(prefix) => {
            report.write_csv(fs::File::create(with_suffix(prefix, ".csv"))?)?;
            fs::write(with_suffix(prefix, ".json"), report.to_json()? + "\n")?;
            eprint!("{}", summary_table(&report));
            manifest.finish(Some(&with_suffix(prefix, ".manifest.json")))
        }
        None => {
            report.write_csv(io::stdout().lock())?;
            manifest.finish(None)
        }
    }
}

fn summary_table(r: &SimulationReport) -> String {
    let mut s = format!(
        "{:<4} {:<12} {:>6} {:>8} {:>10} {:>8}\n",
        "stat", "alternative", "n", "beta", "reject_%", "retries"
    );
    for row in &r.rows {
        let beta = row.beta.map(fmt6).unwrap_or_else(|| "-".into());
        s += &format!(
            "{:<4} {:<12} {:>6} {:>8} {:>10} {:>8}\n",
            row.statistic.to_string(),
            row.alternative,
            row.n,
            beta,
            fmt6(row.reject_pct),
            row.retries
        );
    }
    s
}

/// Six significant digits, `%g` style.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..6).contains(&e) {
        let decimals = (5 - e).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.5e}")
    }
}

fn cmd_analyze(cli: &Cli, c: &AnalyzeCmd) -> Result<(), CliError> {
    let mut manifest = RunManifest::start("analyze", None);
    manifest.flags.insert("grid_points".into(), json!(c.grid_points));
    manifest.flags.insert("window".into(), json!(c.window));
    let (lo, hi) = (c.window[0], c.window[1]);
    if !(lo < hi) {
        return Err(CliError::Usage(format!("--window needs LO < HI, got {lo},{hi}")));
    }
    let inputs = AnalysisInputs {
        x: load(&c.x, cli, &mut manifest)?,
        y: load(&c.y, cli, &mut manifest)?,
        x_tilde: load(&c.x_tilde, cli, &mut manifest)?,
        y_tilde: load(&c.y_tilde, cli, &mut manifest)?,
    };
    let (grid, report) = run_pipeline(&inputs, c.grid_points, (lo, hi))?;
    let p = &c.out_prefix;
    write_grid_csv(&grid, fs::File::create(with_suffix(p, "_grid.csv"))?)?;
    fs::write(
        with_suffix(p, "_fits.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    fs::write(with_suffix(p, "_grid.svg"), grid_svg(&grid))?;
    print!("{}", analysis_table(&report));
    manifest.finish(Some(&with_suffix(p, ".manifest.json")))
}

fn analysis_table(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let fit = |name: &str, f: &crate::analysis::LinearFit| {
        format!(
            "{name:<14} slope {:>10}  intercept {:>10}  points {}\n",
            fmt6(f.slope),
            fmt6(f.intercept),
            f.points
        )
    };
    s += &format!("common range [{}, {}]\n", fmt6(r.c), fmt6(r.d));
    s += &fit("g_hat", &r.fit_g);
    s += &fit("g_tilde_hat", &r.fit_g_tilde);
    s += &fit("g0_hat", &r.fit_g0);
    if let Some(p) = &r.parametric {
        s += &fit("param", &p.fit);
        s += &fit("param_tilde", &p.fit_tilde);
        s += &fit("param_pooled", &p.pooled);
    }
    s += &format!(
        "{:<8} {:<14} {:>10} {:>10} {:>10} {:>10}\n",
        "signal", "method", "pred_mean", "obs_mean", "pred_var", "obs_var"
    );
    for m in &r.moments {
        s += &format!(
            "{:<8} {:<14} {:>10} {:>10} {:>10} {:>10}\n",
            m.signal,
            m.method,
            fmt6(m.predicted_mean),
            fmt6(m.observed_mean),
            fmt6(m.predicted_variance),
            fmt6(m.observed_variance)
        );
    }
    s
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let res = match &cli.command {
        Command::TestCase1(c) => cmd_test_case1(&cli, c),
        Command::TestCase2(c) => cmd_test_case2(&cli, c),
        Command::Simulate(c) => cmd_simulate(c),
        Command::Analyze(c) => cmd_analyze(&cli, c),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
        let p = dir.path().join(name);
        fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p.to_string_lossy().into_owned()
    }

    #[test]
    fn column_formats() {
        let d = tempfile::tempdir().unwrap();
        let plain = file(&d, "a.txt", "1.5\n\n-2\n3e1\n");
        assert_eq!(read_column(&plain, None).unwrap().values, [1.5, -2.0, 30.0]);
        let csv = file(&d, "b.csv", "sbp, age\n120,50\n131.5,61\n");
        assert_eq!(read_column(&format!("{csv}#sbp"), None).unwrap().values, [120.0, 131.5]);
        assert_eq!(read_column(&csv, Some("age")).unwrap().values, [50.0, 61.0]);
        assert_eq!(
            read_column(&format!("{csv}#2"), Some("sbp")).unwrap().values,
            [50.0, 61.0]
        );
        assert!(read_column(&csv, None).is_err());
        assert!(read_column(&file(&d, "e.txt", ""), None).is_err());
        assert!(read_column(&file(&d, "f.txt", "1\nx\n"), None).is_err());
        let c = read_column(&plain, None).unwrap();
        assert_eq!(c.digest.sha256.len(), 64);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage(String::new()).exit_code(), 2);
        assert_eq!(
            CliError::Lib(Error::DegeneratePoint {
                which: "F",
                cdf: 0.0,
                y: 0.0
            })
            .exit_code(),
            3
        );
        assert_eq!(CliError::Lib(Error::NoOverlap { c: 1.0, d: 0.0 }).exit_code(), 4);
        assert_eq!(CliError::Lib(Error::EmptySample).exit_code(), 2);
        assert_eq!(run(["xformtest", "simulate", "--table", "9"]), 2);
    }

    #[test]
    fn six_digit_format() {
        assert_eq!(fmt6(5.49), "5.49");
        assert_eq!(fmt6(100.0), "100");
        assert_eq!(fmt6(0.98765432), "0.987654");
        assert_eq!(fmt6(123456789.0), "1.23457e8");
        assert_eq!(fmt6(-3.841458820694124), "-3.84146");
    }

    #[test]
    fn argument_definitions_are_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn transform_names() {
        assert_eq!(parse_transform("g3", LocalBase::SampleSize).unwrap().label(), "g3");
        assert_eq!(
            parse_transform("affine:4,5", LocalBase::SampleSize).unwrap().label(),
            "g4"
        );
        assert_eq!(
            parse_transform("g5:0.5", LocalBase::SampleSize).unwrap().beta(),
            Some(0.5)
        );
        assert!(parse_transform("g9", LocalBase::SampleSize).is_err());
    }
}
