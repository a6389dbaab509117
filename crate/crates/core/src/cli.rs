//! Command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage or invalid parameters,
//! 3 unreadable or malformed input, 4 model error (too few rows, singular
//! covariance, dimension mismatch), 5 fault not guaranteed detectable.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bank::{self, BankConfig, BankReport, CleaningOrder};
use crate::detectability::{detectability_report, DetectabilityReport, IfParams};
use crate::error::Error;
use crate::io::{self, IoError, TruthRow};
use crate::simkit::{self, CstrConfig, FaultEpisode, FaultSchedule, Scenario};
use crate::stat_core::GaussianModel;
use crate::Time;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_MODEL: i32 = 4;
pub const EXIT_NOT_DETECTABLE: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{0}")]
    Args(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error("fault is not guaranteed detectable: no admissible window")]
    NotDetectable,
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(IoError::Model(e)) | CliError::Core(e) => core_code(e),
            CliError::Io(_) | CliError::Config { .. } => EXIT_INPUT,
            CliError::Args(e) if !e.use_stderr() => 0,
            CliError::Args(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::NotDetectable => EXIT_NOT_DETECTABLE,
            CliError::Other(_) => EXIT_OTHER,
        }
    }
}

fn core_code(e: &Error) -> i32 {
    match e {
        Error::TooFewSamples { .. } | Error::SingularCovariance { .. } | Error::DimensionMismatch { .. } => EXIT_MODEL,
        Error::EmptyWindowSet
        | Error::NotDetectableWithWindow { .. }
        | Error::NotPfDetectable
        | Error::WindowExceedsPrevQuiet { .. } => EXIT_NOT_DETECTABLE,
        Error::Domain(_) => EXIT_USAGE,
        _ => EXIT_OTHER,
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "ifdetect", version, about = "Intermittent fault detection with multi-window moving-average T² charts")]
pub struct Cli {
    /// TOML file supplying defaults for any flag; flags win on conflict.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the fault-free Gaussian model to a training CSV.
    Train {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Detectability verdict, admissible windows and alarm delays.
    Detectability {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        fault: FaultArgs,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Generate a reference scenario: training data, faulty stream and truth.
    Simulate {
        #[arg(value_enum)]
        scenario: ScenarioKind,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; created if missing.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the window bank over a stream and write the JSON report.
    Monitor {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        stream: PathBuf,
        #[command(flatten)]
        fault: FaultArgs,
        /// Explicit window lengths instead of [W*, W#].
        #[arg(long, value_delimiter = ',')]
        windows: Option<Vec<usize>>,
        #[arg(long, value_enum)]
        order: Option<OrderArg>,
        /// Report path; stdout if omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Per-window statistic series `k,W,t2,limit,alarm`.
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Summarize a monitor report, optionally scoring it against truth.
    Report {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioKind {
    Numerical,
    Cstr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderArg {
    CompensateFirst,
    ExcludeFirst,
}

impl From<OrderArg> for CleaningOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::CompensateFirst => CleaningOrder::CompensateFirst,
            OrderArg::ExcludeFirst => CleaningOrder::ExcludeFirst,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct FaultArgs {
    /// Fault direction, comma separated; normalized to unit length.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xi: Option<Vec<f64>>,
    /// Fault magnitude.
    #[arg(long)]
    pub f: Option<f64>,
    /// Shorthand for all three durations.
    #[arg(long)]
    pub tau: Option<usize>,
    #[arg(long)]
    pub tau_on: Option<usize>,
    #[arg(long)]
    pub tau_off_prev: Option<usize>,
    #[arg(long)]
    pub tau_off_next: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Treat magnitude and durations as lower bounds over every episode.
    #[arg(long)]
    pub lower_bounds: bool,
}

/// Config file schema. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_on: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_off_prev: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_off_next: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bounds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub windows: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_passes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cstr: Option<CstrConfig>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| IoError::File { path: path.into(), source })?;
        toml::from_str(&text).map_err(|e| CliError::Config { path: path.into(), message: e.to_string() })
    }
}

fn missing(flag: &str) -> CliError {
    CliError::Usage(format!("missing --{flag} (flag or config key)"))
}

fn resolve_alpha(fault: &FaultArgs, cfg: &ConfigFile) -> CliResult<f64> {
    let alpha = fault.alpha.or(cfg.alpha).unwrap_or(0.01);
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(alpha)
}

/// Merges flags over config values into fault parameters for a `p`-variable model.
pub fn resolve_fault(fault: &FaultArgs, cfg: &ConfigFile, p: usize) -> CliResult<IfParams<f64>> {
    let xi = fault.xi.clone().or_else(|| cfg.xi.clone()).ok_or_else(|| missing("xi"))?;
    if xi.len() != p {
        return Err(Error::DimensionMismatch { expected: p, got: xi.len() }.into());
    }
    let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(CliError::Usage("--xi must be a finite nonzero vector".into()));
    }
    let xi: Vec<f64> = xi.iter().map(|x| x / norm).collect();
    let f = fault.f.or(cfg.f).ok_or_else(|| missing("f"))?;
    let pick = |flag: Option<usize>, key: Option<usize>, name: &str| {
        flag.or(fault.tau).or(key).or(cfg.tau).ok_or_else(|| missing(name))
    };
    let tau_on = pick(fault.tau_on, cfg.tau_on, "tau-on")?;
    let tau_off_prev = pick(fault.tau_off_prev, cfg.tau_off_prev, "tau-off-prev")?;
    let tau_off_next = pick(fault.tau_off_next, cfg.tau_off_next, "tau-off-next")?;
    let mut params = IfParams::new(xi, f, tau_off_prev, tau_on, tau_off_next)?;
    params.is_lower_bound = fault.lower_bounds || cfg.lower_bounds.unwrap_or(false);
    Ok(params)
}

/// Parses `args` (including the program name) and runs the command,
/// writing human-readable output to `out`.
pub fn run<I, T, W>(args: I, out: &mut W) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write,
{
    let cli = Cli::try_parse_from(args)?;
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let text = match cli.command {
        Command::Train { input, output } => cmd_train(&input, &output)?,
        Command::Detectability { model, fault, json } => {
            let (text, rep) = cmd_detectability(&model, &fault, &cfg, json)?;
            out.write_all(text.as_bytes()).map_err(|e| CliError::Other(e.to_string()))?;
            return if rep.admissible_windows.is_empty() { Err(CliError::NotDetectable) } else { Ok(()) };
        }
        Command::Simulate { scenario, seed, out: dir } => {
            let seed = seed.or(cfg.seed).ok_or_else(|| missing("seed"))?;
            cmd_simulate(scenario, seed, &dir, &cfg)?
        }
        Command::Monitor { model, stream, fault, windows, order, report, series } => {
            let opts = MonitorOptions {
                windows: windows.or_else(|| cfg.windows.clone()),
                order: order.or(cfg.order).map(Into::into).unwrap_or_default(),
                max_passes: cfg.max_passes.unwrap_or(BankConfig::default().max_passes),
            };
            let rep = cmd_monitor(&model, &stream, &fault, &cfg, &opts, series.as_deref())?;
            let json = serde_json::to_string_pretty(&rep).expect("report serializes");
            match report {
                Some(p) => {
                    std::fs::write(&p, json).map_err(|source| IoError::File { path: p, source })?;
                    summarize(&rep)
                }
                None => json + "\n",
            }
        }
        Command::Report { report, truth, json } => cmd_report(&report, truth.as_deref(), json)?,
    };
    out.write_all(text.as_bytes()).map_err(|e| CliError::Other(e.to_string()))
}

pub fn cmd_train(input: &Path, output: &Path) -> CliResult<String> {
    let table = io::read_samples(input, None)?;
    let model = GaussianModel::fit(&table.rows)?;
    io::save_model(output, &model, &table.columns)?;
    log::info!("trained on {} rows of {} variables", table.rows.len(), model.dim());
    Ok(format!(
        "model: {} variables, N = {}, written to {}\n",
        model.dim(),
        model.n_train(),
        output.display()
    ))
}

pub fn cmd_detectability(
    model: &Path,
    fault: &FaultArgs,
    cfg: &ConfigFile,
    json: bool,
) -> CliResult<(String, DetectabilityReport)> {
    let mf = io::load_model(model)?;
    let params = resolve_fault(fault, cfg, mf.model.dim())?;
    let alpha = resolve_alpha(fault, cfg)?;
    let rep = detectability_report(&mf.model, &params, alpha)?;
    let text = if json {
        serde_json::to_string_pretty(&rep).expect("report serializes") + "\n"
    } else {
        render_detectability(&rep)
    };
    Ok((text, rep))
}

pub fn render_detectability(rep: &DetectabilityReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "detectable: {}", if rep.detectable { "yes" } else { "no" });
    let _ = writeln!(s, "whitened shift: {:.6}", rep.whitened_shift);
    let _ = writeln!(s, "delta^2: {:.6}", rep.delta_sq);
    let _ = writeln!(s, "margin c-1: {:.6}", rep.margin);
    if rep.admissible_windows.is_empty() {
        let _ = writeln!(s, "admissible windows: none");
    } else {
        let r = rep.admissible_windows;
        let _ = writeln!(s, "admissible windows: [{}, {}]", r.lo, r.hi);
    }
    match rep.w_star {
        Some(w) => {
            let _ = writeln!(s, "W*: {w}");
        }
        None => {
            let _ = writeln!(s, "W*: none");
        }
    }
    let _ = writeln!(s, "W#: {}", rep.w_sharp);
    if !rep.delays.is_empty() {
        let _ = writeln!(s, "W\tmu_d\tnu_d");
        for d in &rep.delays {
            let _ = writeln!(s, "{}\t{}\t{}", d.window, d.mu_delay, d.nu_delay);
        }
    }
    s
}

fn scenario(kind: ScenarioKind, seed: u64, cfg: &ConfigFile) -> CliResult<Scenario> {
    Ok(match kind {
        ScenarioKind::Numerical => simkit::numerical_scenario(seed)?,
        ScenarioKind::Cstr => simkit::cstr_scenario_with(&cfg.cstr.clone().unwrap_or_default(), seed)?,
    })
}

/// Writes `train.csv`, `clean.csv`, `stream.csv`, `truth.csv` and a
/// `fault.toml` config carrying the monitor's lower bounds.
pub fn cmd_simulate(kind: ScenarioKind, seed: u64, dir: &Path, cfg: &ConfigFile) -> CliResult<String> {
    let sc = scenario(kind, seed, cfg)?;
    std::fs::create_dir_all(dir).map_err(|source| IoError::File { path: dir.into(), source })?;
    let cols = io::default_columns(sc.model.dim());
    io::write_samples_file(&dir.join("train.csv"), &cols, &sc.train)?;
    io::write_samples_file(&dir.join("clean.csv"), &cols, &sc.clean)?;
    io::write_samples_file(&dir.join("stream.csv"), &cols, &sc.test)?;
    io::write_truth_file(&dir.join("truth.csv"), &io::truth_rows(&sc.schedule))?;
    let fault = ConfigFile {
        alpha: Some(sc.alpha),
        xi: Some(sc.params.direction.clone()),
        f: Some(sc.params.magnitude),
        tau_on: Some(sc.params.tau_on),
        tau_off_prev: Some(sc.params.tau_off_prev),
        tau_off_next: Some(sc.params.tau_off_next),
        lower_bounds: Some(sc.params.is_lower_bound),
        seed: Some(seed),
        ..ConfigFile::default()
    };
    let path = dir.join("fault.toml");
    std::fs::write(&path, toml::to_string(&fault).expect("config serializes"))
        .map_err(|source| IoError::File { path, source })?;
    Ok(format!(
        "{} scenario, seed {seed}: {} training rows, {} stream rows, {} episodes written to {}\n",
        sc.name,
        sc.train.len(),
        sc.test.len(),
        sc.schedule.len(),
        dir.display()
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorOptions {
    pub windows: Option<Vec<usize>>,
    pub order: CleaningOrder,
    pub max_passes: usize,
}

pub fn cmd_monitor(
    model: &Path,
    stream: &Path,
    fault: &FaultArgs,
    cfg: &ConfigFile,
    opts: &MonitorOptions,
    series: Option<&Path>,
) -> CliResult<BankReport> {
    let mf = io::load_model(model)?;
    let table = io::read_samples(stream, None)?;
    if table.columns.len() != mf.model.dim() {
        return Err(Error::DimensionMismatch { expected: mf.model.dim(), got: table.columns.len() }.into());
    }
    if let Some(c) = mf.columns.iter().find(|c| !table.columns.contains(c)) {
        return Err(IoError::MissingColumn { path: stream.into(), column: c.clone() }.into());
    }
    // reorder stream columns to the model's
    let idx: Vec<usize> = mf
        .columns
        .iter()
        .map(|c| table.columns.iter().position(|t| t == c).expect("checked above"))
        .collect();
    let rows: Vec<Vec<f64>> = table.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect();

    let params = resolve_fault(fault, cfg, mf.model.dim())?;
    let config = BankConfig { alpha: resolve_alpha(fault, cfg)?, order: opts.order, max_passes: opts.max_passes };
    let model = Arc::new(mf.model);
    let mut bank = match &opts.windows {
        Some(ws) => bank::Bank::with_windows(model, &params, ws, config)?,
        None => bank::Bank::new(model, &params, config)?,
    };
    let windows = bank.windows();
    let limits: Vec<f64> = bank.charts().iter().map(|c| c.limit()).collect();
    let mut writer = match series {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|source| IoError::File { path: p.into(), source })?;
            let mut w = csv::Writer::from_writer(f);
            w.write_record(["k", "W", "t2", "limit", "alarm"]).map_err(|e| series_err(p, e))?;
            Some((p, w))
        }
        None => None,
    };
    for (i, row) in rows.iter().enumerate() {
        let outs = bank.push(row)?;
        if let Some((p, w)) = writer.as_mut() {
            for ((out, &win), &lim) in outs.iter().zip(&windows).zip(&limits) {
                if let Some(o) = out {
                    let rec = [
                        (i + 1).to_string(),
                        win.to_string(),
                        o.t2.to_string(),
                        lim.to_string(),
                        u8::from(o.alarm).to_string(),
                    ];
                    w.write_record(&rec).map_err(|e| series_err(p, e))?;
                }
            }
        }
    }
    if let Some((p, mut w)) = writer {
        w.flush().map_err(|source| IoError::File { path: p.into(), source })?;
    }
    let rep = bank.report();
    log::info!(
        "{} samples, windows {:?}, {} confirmed episodes",
        rep.samples,
        windows,
        rep.confirmed().count()
    );
    Ok(rep)
}

fn series_err(path: &Path, e: csv::Error) -> CliError {
    CliError::Other(format!("{}: {e}", path.display()))
}

fn interval(lo: Time, hi: Option<Time>) -> String {
    match hi {
        Some(h) => format!("[{lo}, {h}]"),
        None => format!("[{lo}, end)"),
    }
}

pub fn summarize(rep: &BankReport) -> String {
    let mut s = String::new();
    let ws: Vec<String> = rep.windows.iter().map(|w| w.window.to_string()).collect();
    let _ = writeln!(s, "samples: {}  windows: {}", rep.samples, ws.join(","));
    let _ = writeln!(
        s,
        "episodes: {} ({} confirmed), cleaning passes: {}{}",
        rep.episodes.len(),
        rep.confirmed().count(),
        rep.cleaning_passes,
        if rep.cleaning_cap_exceeded { " (cap exceeded)" } else { "" }
    );
    for e in &rep.episodes {
        let flags: Vec<String> = e.flags.iter().map(|f| format!("{f:?}")).collect();
        let _ = writeln!(
            s,
            "  q={} mu in {} nu in {}{}{}",
            e.q,
            interval(e.mu_lo, Some(e.mu_hi)),
            interval(e.nu_lo, e.nu_hi),
            if e.confirmed { "" } else { " unconfirmed" },
            if flags.is_empty() { String::new() } else { format!(" [{}]", flags.join(", ")) }
        );
    }
    s
}

#[derive(Debug, Serialize)]
struct ReportSummary<'a> {
    report: &'a BankReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    score: Option<simkit::Score>,
}

fn schedule_from_truth(rows: &[TruthRow]) -> CliResult<FaultSchedule<f64>> {
    let eps = rows
        .iter()
        .map(|r| FaultEpisode { mu: r.mu, nu: r.nu, direction: Vec::new(), magnitude: r.f })
        .collect();
    Ok(FaultSchedule::new(eps)?)
}

pub fn cmd_report(report: &Path, truth: Option<&Path>, json: bool) -> CliResult<String> {
    let text = std::fs::read_to_string(report)
        .map_err(|source| IoError::File { path: report.into(), source })?;
    let rep: BankReport = serde_json::from_str(&text)
        .map_err(|e| IoError::Format { path: report.into(), message: e.to_string() })?;
    let score = match truth {
        Some(p) => Some(simkit::score(&rep, &schedule_from_truth(&io::read_truth_file(p)?)?)),
        None => None,
    };
    if json {
        let doc = ReportSummary { report: &rep, score };
        return Ok(serde_json::to_string_pretty(&doc).expect("summary serializes") + "\n");
    }
    let mut s = summarize(&rep);
    if let Some(sc) = score {
        let _ = writeln!(s, "truth: {} episodes, {} contained, {} spurious", sc.truths.len(), sc.contained_count(), sc.spurious.len());
        for t in &sc.truths {
            let m = t.matched.map_or("missed".to_string(), |q| format!("q={q}"));
            let _ = writeln!(
                s,
                "  mu={} nu={} {m} mu_contained={} nu_contained={}",
                t.mu, t.nu, t.mu_contained, t.nu_contained
            );
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fault(xi: Option<Vec<f64>>, tau: Option<usize>, tau_on: Option<usize>) -> FaultArgs {
        FaultArgs { xi, f: Some(4.0), tau, tau_on, ..FaultArgs::default() }
    }

    #[test]
    fn flags_win_over_config() {
        let cfg = ConfigFile { xi: Some(vec![0.0, 1.0]), tau: Some(12), f: Some(9.0), ..ConfigFile::default() };
        let p = resolve_fault(&fault(Some(vec![3.0, 4.0]), None, Some(15)), &cfg, 2).unwrap();
        assert_eq!(p.direction, vec![0.6, 0.8]);
        assert_eq!(p.magnitude, 4.0);
        assert_eq!((p.tau_off_prev, p.tau_on, p.tau_off_next), (12, 15, 12));
    }

    #[test]
    fn config_fills_missing_flags() {
        let cfg = ConfigFile { xi: Some(vec![1.0, 0.0]), lower_bounds: Some(true), tau: Some(10), ..ConfigFile::default() };
        let p = resolve_fault(&fault(None, None, None), &cfg, 2).unwrap();
        assert!(p.is_lower_bound);
        assert_eq!(p.durations().w_sharp(), 10);
    }

    #[test]
    fn missing_duration_is_usage_error() {
        let err = resolve_fault(&fault(Some(vec![1.0]), None, None), &ConfigFile::default(), 1).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
        assert!(err.to_string().contains("--tau-on"), "{err}");
    }

    #[test]
    fn direction_dimension_is_checked() {
        let err = resolve_fault(&fault(Some(vec![1.0]), Some(10), None), &ConfigFile::default(), 2).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_MODEL);
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        assert!(toml::from_str::<ConfigFile>("alpah = 0.1").is_err());
        let cfg: ConfigFile = toml::from_str("alpha = 0.05\nwindows = [7, 8]\norder = \"compensate_first\"\n[cstr]\nkp_t = 6.0\n").unwrap();
        assert_eq!(cfg.order, Some(OrderArg::CompensateFirst));
        assert_eq!(cfg.cstr.unwrap().kp_t, 6.0);
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            CliError::Usage(String::new()).exit_code(),
            CliError::Io(IoError::Format { path: "x".into(), message: String::new() }).exit_code(),
            CliError::Core(Error::SingularCovariance { rcond: 0.0 }).exit_code(),
            CliError::NotDetectable.exit_code(),
            CliError::Other(String::new()).exit_code(),
        ];
        let mut sorted = codes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), codes.len());
        assert!(codes.iter().all(|&c| c != 0));
    }
}
