//! Command-line front end.
//!
//! Every command writes its artifacts plus a `manifest.json` into `--out`.
//! `replay <manifest>` reruns a recorded command and reproduces its artifacts
//! byte for byte.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_ci, BootstrapOptions};
use crate::error::{PpsbmError, Result};
use crate::estimate::Estimator;
use crate::events::{parse_event_csv, EventStream, StreamMeta};
use crate::experiments::{ari_replicates_csv, ari_table_csv, scenario1_ari_table, scenario2_selection, DEFAULT_PHIS};
use crate::intensity::IntensityModel;
use crate::kernel::DEFAULT_GRID_POINTS;
use crate::metrics::{adjusted_rand_index, risk_report, RiskReport, DEFAULT_RISK_GRID};
use crate::rng;
use crate::selection::{icl, select_q};
use crate::simulator::{scenario1_model, scenario2_model, simulate_with};
use crate::sparse::run_vem_sparse;
use crate::vem::{run_vem, FitConfig, FitResult};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "ppsbm", version, about = "Poisson process stochastic block model for interaction event data")]
pub struct Cli {
    /// Size of the worker pool; defaults to one worker per core.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a benchmark scenario or a model from JSON.
    Simulate(SimulateArgs),
    /// Fit the model with a fixed number of groups.
    Fit(FitArgs),
    /// Choose the number of groups by ICL.
    SelectQ(SelectArgs),
    /// Parametric bootstrap bands for a fitted model.
    Bootstrap(BootstrapArgs),
    /// Compare a fit with the generating truth.
    Metrics(MetricsArgs),
    /// Run a replicated benchmark experiment.
    Reproduce(ReproduceArgs),
    /// Rerun the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Scenario1,
    Scenario2,
    /// Model read from `--model`.
    Model,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EstimatorName {
    Histogram,
    Kernel,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub scenario: Scenario,
    /// Phase shift of the between-group intensity (scenario1).
    #[arg(long, default_value_t = 0.5)]
    pub phi: f64,
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Uniform dyad activation probability for sparse data.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Model JSON for `model`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// How to read an event CSV; flags win over the metadata file.
#[derive(Debug, Args)]
pub struct StreamArgs {
    /// Metadata JSON (`n`, `T`, `directed`); defaults to `<events>.meta.json` when present.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long, conflicts_with = "undirected")]
    pub directed: bool,
    #[arg(long)]
    pub undirected: bool,
    /// Observation horizon `T`.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Number of nodes.
    #[arg(long)]
    pub nodes: Option<usize>,
}

/// Fit settings; flags win over `--config`, which wins over defaults.
#[derive(Debug, Args, Default)]
pub struct ConfigArgs {
    /// FitConfig JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorName>,
    #[arg(long)]
    pub dmax: Option<u32>,
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub nb_iter: Option<usize>,
    #[arg(long)]
    pub fix_iter: Option<usize>,
    #[arg(long)]
    pub fix_eps: Option<f64>,
    #[arg(long)]
    pub n_perturb: Option<usize>,
    #[arg(long)]
    pub perc_perturb: Option<f64>,
    #[arg(long)]
    pub l_part: Option<u32>,
    #[arg(long)]
    pub kmeans_restarts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub events: PathBuf,
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub sparse: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub stream: StreamArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    pub events: PathBuf,
    #[arg(long)]
    pub qmax: usize,
    #[arg(long)]
    pub sparse: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub stream: StreamArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    /// Fit JSON produced by `fit`.
    #[arg(long)]
    pub fit: PathBuf,
    /// Nodes per replicate; defaults to the fitted network size.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0.9)]
    pub level: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub fit: PathBuf,
    /// Truth JSON produced by `simulate`.
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RISK_GRID)]
    pub points: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub scenario: Scenario,
    #[arg(long, default_value_t = 50)]
    pub replicates: usize,
    /// Nodes per replicate; 30 for scenario1, 50 for scenario2.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated phase shifts (scenario1).
    #[arg(long, value_delimiter = ',')]
    pub phi: Vec<f64>,
    #[arg(long, default_value_t = 6)]
    pub qmax: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Output directory for the rerun; defaults to the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Record of one command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Arguments after the program name, as given.
    pub argv: Vec<String>,
    /// Directory against which relative paths in `argv` resolve.
    pub cwd: PathBuf,
    pub config: Option<FitConfig>,
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
    pub duration_secs: f64,
}

/// Ground truth written next to simulated events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub scenario: Scenario,
    pub model: IntensityModel,
    /// 1-based group of every node.
    pub labels: Vec<usize>,
    pub beta: Option<f64>,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub ari: f64,
    pub risk: Option<RiskReport>,
}

/// Parses `argv` (including the program name) and runs the command.
///
/// Returns 0 on success, 2 on usage errors and 1 on runtime errors; errors are
/// reported as one JSON line on stderr.
pub fn dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let base = std::env::current_dir().unwrap_or_else(|_| PathBuf::from("."));
    match Cli::try_parse_from(&argv) {
        Ok(cli) => match execute(cli, &argv[1.min(argv.len())..], &base) {
            Ok(()) => 0,
            Err(err) => {
                report_error(err.kind(), &err.to_string());
                1
            }
        },
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                0
            } else {
                let message = err.to_string();
                report_error("usage", message.lines().next().unwrap_or("invalid arguments"));
                2
            }
        }
    }
}

fn report_error(kind: &str, message: &str) {
    eprintln!("{}", serde_json::json!({ "error": kind, "message": message.trim() }));
}

fn execute(cli: Cli, args: &[String], base: &Path) -> Result<()> {
    match cli.workers {
        Some(0) => Err(PpsbmError::InvalidConfig("--workers must be at least 1".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| PpsbmError::InvalidConfig(format!("worker pool: {e}")))?;
            pool.install(|| run(cli.command, args, base))
        }
        None => run(cli.command, args, base),
    }
}

struct Recorder {
    subcommand: &'static str,
    argv: Vec<String>,
    cwd: PathBuf,
    out: PathBuf,
    config: Option<FitConfig>,
    seed: Option<u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    started: Instant,
}

impl Recorder {
    fn new(subcommand: &'static str, args: &[String], base: &Path, out: &Path) -> Result<Self> {
        let out = base.join(out);
        std::fs::create_dir_all(&out)?;
        Ok(Self {
            subcommand,
            argv: args.to_vec(),
            cwd: base.to_path_buf(),
            out,
            config: None,
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
        })
    }

    fn input(&mut self, path: &Path) -> PathBuf {
        let full = self.cwd.join(path);
        self.inputs.push(full.clone());
        full
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.out.join(name), contents)?;
        self.outputs.push(PathBuf::from(name));
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    fn finish(self) -> Result<()> {
        let manifest = RunManifest {
            subcommand: self.subcommand.to_string(),
            argv: self.argv,
            cwd: self.cwd,
            config: self.config,
            seed: self.seed,
            inputs: self.inputs,
            outputs: self.outputs,
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_secs: self.started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        std::fs::write(self.out.join(MANIFEST_FILE), text)?;
        Ok(())
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Resolves the fit configuration: defaults, then `--config`, then flags.
pub fn resolve_config(args: &ConfigArgs, base: &Path) -> Result<FitConfig> {
    let mut cfg = match &args.config {
        Some(path) => read_json::<FitConfig>(&base.join(path))?,
        None => FitConfig::default(),
    };
    let current_dmax = match cfg.estimator {
        Estimator::Histogram { d_max } => d_max,
        _ => 3,
    };
    let (current_bw, current_grid) = match cfg.estimator {
        Estimator::Kernel { bandwidth, grid_points } => (bandwidth, grid_points),
        _ => (None, DEFAULT_GRID_POINTS),
    };
    let kind = args.estimator.unwrap_or(if cfg.estimator.is_histogram() {
        EstimatorName::Histogram
    } else {
        EstimatorName::Kernel
    });
    cfg.estimator = match kind {
        EstimatorName::Histogram => Estimator::Histogram { d_max: args.dmax.unwrap_or(current_dmax) },
        EstimatorName::Kernel => Estimator::Kernel {
            bandwidth: args.bandwidth.or(current_bw),
            grid_points: args.grid_points.unwrap_or(current_grid),
        },
    };
    macro_rules! overlay {
        ($($field:ident),*) => { $( if let Some(v) = args.$field { cfg.$field = v; } )* };
    }
    overlay!(epsilon, nb_iter, fix_iter, fix_eps, n_perturb, perc_perturb, l_part, kmeans_restarts);
    cfg.validate()?;
    Ok(cfg)
}

fn meta_sidecar(events: &Path) -> PathBuf {
    events.with_extension("meta.json")
}

fn load_stream(rec: &mut Recorder, events: &Path, args: &StreamArgs) -> Result<EventStream> {
    let path = rec.input(events);
    let mut meta = match &args.meta {
        Some(m) => {
            let m = rec.input(m);
            StreamMeta::from_json(&std::fs::read_to_string(m)?)?
        }
        None => {
            let sidecar = meta_sidecar(&path);
            if sidecar.exists() {
                rec.inputs.push(sidecar.clone());
                StreamMeta::from_json(&std::fs::read_to_string(sidecar)?)?
            } else {
                StreamMeta::default()
            }
        }
    };
    if args.directed {
        meta.directed = Some(true);
    }
    if args.undirected {
        meta.directed = Some(false);
    }
    meta.horizon = args.horizon.or(meta.horizon);
    meta.n = args.nodes.or(meta.n);
    let text = std::fs::read_to_string(&path)?;
    parse_event_csv(&text, meta.directed.unwrap_or(false), meta)
}

fn run(command: Command, args: &[String], base: &Path) -> Result<()> {
    match command {
        Command::Simulate(a) => simulate(a, args, base),
        Command::Fit(a) => fit(a, args, base),
        Command::SelectQ(a) => select(a, args, base),
        Command::Bootstrap(a) => bootstrap(a, args, base),
        Command::Metrics(a) => metrics(a, args, base),
        Command::Reproduce(a) => reproduce(a, args, base),
        Command::Replay(a) => replay(a, base),
    }
}

fn simulate(a: SimulateArgs, args: &[String], base: &Path) -> Result<()> {
    let mut rec = Recorder::new("simulate", args, base, &a.out)?;
    rec.seed = Some(a.seed);
    let model = match a.scenario {
        Scenario::Scenario1 => scenario1_model(a.phi)?,
        Scenario::Scenario2 => scenario2_model(),
        Scenario::Model => {
            let path = a.model.as_ref().ok_or_else(|| PpsbmError::InvalidConfig("`model` needs --model".into()))?;
            let path = rec.input(path);
            let model: IntensityModel = read_json(&path)?;
            model.validate()?;
            model
        }
    };
    let beta = a.beta.map(|b| vec![b; model.layout().len()]);
    let sim = simulate_with(
        &model.pi,
        &model.alpha,
        model.horizon,
        model.directed,
        a.n,
        beta.as_deref(),
        &mut rng::from_seed(a.seed),
    )?;
    rec.write("events.csv", &sim.stream.to_csv())?;
    rec.write_json("events.meta.json", &sim.stream.meta())?;
    let truth = Truth {
        scenario: a.scenario,
        labels: sim.labels.iter().map(|z| z + 1).collect(),
        model,
        beta: a.beta,
        n: a.n,
        seed: a.seed,
    };
    rec.write_json("truth.json", &truth)?;
    println!("{}", serde_json::json!({ "events": sim.stream.len(), "n": a.n }));
    rec.finish()
}

fn fit(a: FitArgs, args: &[String], base: &Path) -> Result<()> {
    let mut rec = Recorder::new("fit", args, base, &a.out)?;
    let cfg = resolve_config(&a.config, base)?;
    if let Some(c) = &a.config.config {
        rec.input(c);
    }
    let stream = load_stream(&mut rec, &a.events, &a.stream)?;
    let result = if a.sparse {
        run_vem_sparse(&stream, a.q, &cfg, a.seed)?
    } else {
        run_vem(&stream, a.q, &cfg, a.seed)?
    };
    rec.config = Some(cfg);
    rec.seed = Some(a.seed);
    rec.write_json("fit.json", &result)?;
    let icl_value = icl(&result, &stream).ok();
    println!("{}", serde_json::json!({ "groups": result.groups, "J": result.j, "icl": icl_value, "converged": result.converged }));
    rec.finish()
}

fn select(a: SelectArgs, args: &[String], base: &Path) -> Result<()> {
    let mut rec = Recorder::new("select-q", args, base, &a.out)?;
    let cfg = resolve_config(&a.config, base)?;
    if let Some(c) = &a.config.config {
        rec.input(c);
    }
    let stream = load_stream(&mut rec, &a.events, &a.stream)?;
    let report = select_q(&stream, a.qmax, &cfg, a.seed, a.sparse)?;
    rec.config = Some(cfg);
    rec.seed = Some(a.seed);
    rec.write_json("icl.json", &report)?;
    if let Some(best) = report.chosen_fit() {
        rec.write_json("fit.json", best)?;
    }
    println!("{}", serde_json::json!({ "chosen": report.chosen }));
    rec.finish()
}

fn bootstrap(a: BootstrapArgs, args: &[String], base: &Path) -> Result<()> {
    let mut rec = Recorder::new("bootstrap", args, base, &a.out)?;
    let cfg = resolve_config(&a.config, base)?;
    let fit_path = rec.input(&a.fit);
    let fit: FitResult = read_json(&fit_path)?;
    let opts = BootstrapOptions { replicates: a.replicates, level: a.level, grid_points: a.points, n: a.n.unwrap_or(fit.n) };
    let bands = bootstrap_ci(&fit, &opts, &cfg, a.seed)?;
    rec.config = Some(FitConfig { estimator: fit.estimator, ..cfg });
    rec.seed = Some(a.seed);
    rec.write("bands.csv", &bands.to_csv())?;
    let summary = serde_json::json!({
        "level": bands.level,
        "replicates": bands.replicates,
        "empty_group_replicates": bands.empty_group_replicates,
        "failed_replicates": bands.failed_replicates,
    });
    rec.write_json("bootstrap.json", &summary)?;
    println!("{summary}");
    rec.finish()
}

fn metrics(a: MetricsArgs, args: &[String], base: &Path) -> Result<()> {
    let mut rec = Recorder::new("metrics", args, base, &a.out)?;
    let fit: FitResult = read_json(&rec.input(&a.fit))?;
    let truth: Truth = read_json(&rec.input(&a.truth))?;
    let true_labels: Vec<usize> = truth.labels.iter().map(|z| z.saturating_sub(1)).collect();
    let ari = adjusted_rand_index(&fit.map_labels(), &true_labels)?;
    let risk = if truth.model.groups() == fit.groups && truth.model.directed == fit.directed {
        Some(risk_report(&fit.alpha, &truth.model.alpha, fit.layout(), fit.horizon, a.points)?)
    } else {
        None
    };
    let report = MetricsReport { ari, risk };
    rec.write_json("metrics.json", &report)?;
    println!("{}", serde_json::json!({ "ari": ari, "risk_total": report.risk.as_ref().map(|r| r.total) }));
    rec.finish()
}

fn reproduce(a: ReproduceArgs, args: &[String], base: &Path) -> Result<()> {
    let mut rec = Recorder::new("reproduce", args, base, &a.out)?;
    let cfg = resolve_config(&a.config, base)?;
    match a.scenario {
        Scenario::Scenario1 => {
            let phis = if a.phi.is_empty() { DEFAULT_PHIS.to_vec() } else { a.phi.clone() };
            let rows = scenario1_ari_table(&phis, a.n.unwrap_or(30), a.replicates, &cfg, a.seed)?;
            rec.write("ari_table.csv", &ari_table_csv(&rows))?;
            rec.write("ari_replicates.csv", &ari_replicates_csv(&rows))?;
            for r in &rows {
                println!("{}", serde_json::json!({ "phi": r.phi, "median_ari": r.median }));
            }
        }
        Scenario::Scenario2 => {
            let chosen = scenario2_selection(a.n.unwrap_or(50), a.qmax, a.replicates, &cfg, a.seed)?;
            let mut csv = String::from("replicate,q_hat\n");
            for (k, q) in chosen.iter().enumerate() {
                csv.push_str(&format!("{k},{q}\n"));
            }
            rec.write("selection.csv", &csv)?;
            let hits = chosen.iter().filter(|&&q| q == 3).count();
            let summary = serde_json::json!({
                "replicates": chosen.len(),
                "fraction_true_q": hits as f64 / chosen.len().max(1) as f64,
            });
            rec.write_json("selection_summary.json", &summary)?;
            println!("{summary}");
        }
        Scenario::Model => {
            return Err(PpsbmError::InvalidConfig("reproduce supports scenario1 and scenario2".into()));
        }
    }
    rec.config = Some(cfg);
    rec.seed = Some(a.seed);
    rec.finish()
}

/// Removes `--out <dir>` / `--out=<dir>` from recorded arguments.
fn strip_out(argv: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len());
    let mut skip = false;
    for arg in argv {
        if skip {
            skip = false;
        } else if arg == "--out" {
            skip = true;
        } else if !arg.starts_with("--out=") {
            out.push(arg.clone());
        }
    }
    out
}

fn replay(a: ReplayArgs, base: &Path) -> Result<()> {
    let manifest: RunManifest = read_json(&base.join(&a.manifest))?;
    let mut argv = vec!["ppsbm".to_string()];
    match &a.out {
        Some(out) => {
            argv.extend(strip_out(&manifest.argv));
            argv.push("--out".into());
            argv.push(base.join(out).to_string_lossy().into_owned());
        }
        None => argv.extend(manifest.argv.iter().cloned()),
    }
    let cli = Cli::try_parse_from(&argv)
        .map_err(|e| PpsbmError::InvalidConfig(format!("manifest arguments do not parse: {}", e.kind())))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(PpsbmError::InvalidConfig("manifest records a replay".into()));
    }
    execute(cli, &argv[1..], &manifest.cwd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_out_flags() {
        let argv: Vec<String> = ["fit", "x.csv", "--out", "a", "--q", "2", "--out=b"].iter().map(|s| s.to_string()).collect();
        assert_eq!(strip_out(&argv), vec!["fit", "x.csv", "--q", "2"]);
    }

    #[test]
    fn config_precedence() {
        let dir = std::env::temp_dir().join(format!("ppsbm-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("c.json"), r#"{"nb_iter": 7, "epsilon": 1e-3, "estimator": {"kind": "histogram", "d_max": 2}}"#).unwrap();
        let args = ConfigArgs { config: Some("c.json".into()), nb_iter: Some(9), ..ConfigArgs::default() };
        let cfg = resolve_config(&args, &dir).unwrap();
        assert_eq!(cfg.nb_iter, 9);
        assert_eq!(cfg.epsilon, 1e-3);
        assert_eq!(cfg.estimator, Estimator::Histogram { d_max: 2 });
        assert_eq!(cfg.fix_iter, FitConfig::default().fix_iter);
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(dispatch(["ppsbm", "fit"]), 2);
        assert_eq!(dispatch(["ppsbm", "nonsense"]), 2);
        assert_eq!(dispatch(["ppsbm", "--help"]), 0);
    }
}
