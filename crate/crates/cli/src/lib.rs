//! Command-line front end for the `multigroup` library.

pub mod plot;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use multigroup::dynamics::{propagation_growth_rates, GrowthRates, NoiseModel};
use multigroup::experiments::{
    graph_metrics, read_csv, run_sweep_with_workers, write_csv, Metric, NetworkMetrics, SweepConfig,
};
use multigroup::io::{read_edge_list, write_dot, write_edge_list, GraphDocument};
use multigroup::regression::fit_metric;
use multigroup::{generate, Modality, ModalityParams};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "multigroup", version, about = "Multi-group network generation and dynamics experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one network (JSON, DOT or edge list chosen by --out extension)
    Gen(GenArgs),
    /// Structural and dynamical metrics of a graph file (JSON or edge list)
    Metrics(MetricsArgs),
    /// Run a seeded size sweep and write one CSV row per replication
    Sweep(SweepArgs),
    /// Fit the size/degree/modality regression for one metric of a sweep CSV
    Regress(RegressArgs),
    /// Plot one metric of a sweep CSV as an SVG line chart with 95% bands
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Within-group non-edge probability ε [default: 0.1]; co-member inclusion becomes 1 - ε
    #[arg(long)]
    pub eps: Option<f64>,
    /// Edge-bundle scale: a tree edge gets max(2, round(scale * s_i * s_j)) cross edges [default: 0.05]
    #[arg(long = "bundle-scale")]
    pub bundle_scale: Option<f64>,
}

impl ModelArgs {
    fn apply(&self, base: ModalityParams) -> ModalityParams {
        let mut p = match self.eps {
            Some(eps) => ModalityParams {
                bundle_scale: base.bundle_scale,
                ..ModalityParams::with_epsilon(eps)
            },
            None => base,
        };
        if let Some(scale) = self.bundle_scale {
            p.bundle_scale = scale;
        }
        p
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub modality: Modality,
    /// Number of group members (liaisons come on top)
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output file: .json, .dot, anything else is an edge list; JSON on stdout if omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Graph file: JSON document (.json) or edge list
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Skip the steady-state deviation above this many nodes
    #[arg(long = "heavy-max-n", default_value_t = 600)]
    pub heavy_max_n: usize,
    /// Uniform noise variance for the steady-state deviation
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// Infection rate; with --gamma adds SI/SIS growth rates
    #[arg(long, requires = "gamma")]
    pub beta: Option<f64>,
    /// Recovery rate
    #[arg(long, requires = "beta")]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep configuration; flags below override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sizes as a list `50,100,150` or a range `start:end:step` [default: 50:2000:50]
    #[arg(long, value_parser = parse_sizes)]
    pub sizes: Option<Sizes>,
    /// Replications per (modality, size) [default: 100]
    #[arg(long)]
    pub reps: Option<usize>,
    /// Comma-separated modalities [default: all four]
    #[arg(long, value_delimiter = ',')]
    pub modality: Vec<Modality>,
    /// Master seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Compute the steady-state deviation only up to this many nodes [default: 600]
    #[arg(long = "heavy-max-n")]
    pub heavy_max_n: Option<usize>,
    /// Worker threads; output does not depend on it
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// CSV output; stdout if omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RegressArgs {
    /// Sweep CSV
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Response metric, e.g. lambda_max, tau_asym, delta_ss
    #[arg(long)]
    pub metric: Metric,
    /// Output file: .json for JSON, anything else for the text table; stdout if omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Sweep CSV
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub metric: Metric,
    /// SVG output
    #[arg(long)]
    pub out: PathBuf,
}

/// Parsed `--sizes` value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<usize>);

pub fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("`{t}` is not a size"))
    };
    let sizes = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, end, step] = parts[..] else {
            return Err("ranges are written start:end:step".into());
        };
        let (start, end, step) = (num(start)?, num(end)?, num(step)?);
        if step == 0 || start > end {
            return Err("range needs step > 0 and start <= end".into());
        }
        (start..=end).step_by(step).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if sizes.is_empty() {
        return Err("no sizes given".into());
    }
    Ok(Sizes(sizes))
}

/// Failure of a subcommand after argument parsing.
#[derive(Debug)]
pub struct Failure(pub String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Parses `argv` and runs the subcommand; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            EXIT_FAILURE
        }
    }
}

pub fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen(a) => cmd_gen(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Regress(a) => cmd_regress(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn cmd_gen(a: GenArgs) -> Result<(), Failure> {
    let params = a.model.apply(ModalityParams::default());
    let net = generate(a.modality, a.n, &params, a.seed)?;
    let text = match a.out.as_deref().and_then(extension).as_deref() {
        Some("dot") => write_dot(&net),
        Some("json") | None => GraphDocument::from_network(&net).to_json()?,
        Some(_) => write_edge_list(&net.graph),
    };
    emit(a.out.as_deref(), &text)
}

#[derive(Debug, Serialize)]
struct MetricsReport {
    modality: Option<String>,
    seed: Option<u64>,
    groups: Option<usize>,
    edges: usize,
    #[serde(flatten)]
    metrics: NetworkMetrics,
    degree_histogram: std::collections::BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    growth_rates: Option<GrowthRates>,
}

fn cmd_metrics(a: MetricsArgs) -> Result<(), Failure> {
    let text = read_file(&a.input)?;
    let (graph, doc) = if extension(&a.input).as_deref() == Some("json") {
        let doc = GraphDocument::from_json(&text)?;
        (doc.to_graph()?, Some(doc))
    } else {
        (read_edge_list(&text)?, None)
    };
    let group_count = doc.as_ref().map_or(0, |d| d.groups.len());
    let metrics = graph_metrics(&graph, group_count, &NoiseModel::uniform(a.sigma2), a.heavy_max_n)?;
    let growth_rates = match (a.beta, a.gamma) {
        (Some(b), Some(g)) => Some(propagation_growth_rates(metrics.lambda_max, b, g)?),
        _ => None,
    };
    let report = MetricsReport {
        modality: doc.as_ref().map(|d| d.modality.clone()),
        seed: doc.as_ref().map(|d| d.seed),
        groups: doc.as_ref().map(|d| d.groups.len()),
        edges: graph.edge_count(),
        metrics,
        degree_histogram: graph.degree_histogram(),
        growth_rates,
    };
    let json = serde_json::to_string_pretty(&report)? + "\n";
    emit(a.out.as_deref(), &json)
}

/// Effective sweep configuration: file (or defaults) overridden by flags.
pub fn sweep_config(a: &SweepArgs) -> Result<SweepConfig, Failure> {
    let mut cfg = match &a.config {
        Some(path) => SweepConfig::from_json(&read_file(path)?)?,
        None => SweepConfig::default(),
    };
    if let Some(sizes) = &a.sizes {
        cfg.sizes = sizes.0.clone();
    }
    if let Some(reps) = a.reps {
        cfg.replications = reps;
    }
    if !a.modality.is_empty() {
        cfg.modalities = a.modality.clone();
    }
    if let Some(seed) = a.seed {
        cfg.master_seed = seed;
    }
    if let Some(h) = a.heavy_max_n {
        cfg.heavy_metrics_max_n = h;
    }
    cfg.params = a.model.apply(cfg.params);
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_sweep(a: SweepArgs) -> Result<(), Failure> {
    let cfg = sweep_config(&a)?;
    log::info!(
        "sweep: {} modalities x {} sizes x {} replications",
        cfg.modalities.len(),
        cfg.sizes.len(),
        cfg.replications
    );
    let records = run_sweep_with_workers(&cfg, a.workers)?;
    let failed = records.iter().filter(|r| r.metrics.is_err()).count();
    if failed > 0 {
        log::warn!("{failed} of {} replications failed", records.len());
    }
    match &a.out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            write_csv(&records, std::io::BufWriter::new(file))?;
        }
        None => write_csv(&records, std::io::stdout().lock())?,
    }
    Ok(())
}

fn read_records(path: &Path) -> Result<Vec<multigroup::experiments::MetricsRecord>, Failure> {
    let file = fs::File::open(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    Ok(read_csv(file)?)
}

fn cmd_regress(a: RegressArgs) -> Result<(), Failure> {
    let records = read_records(&a.input)?;
    let fit = fit_metric(&records, a.metric)?;
    let text = match a.out.as_deref().and_then(extension).as_deref() {
        Some("json") => fit.to_json()?,
        _ => format!("{fit}\n"),
    };
    emit(a.out.as_deref(), &text)
}

fn cmd_plot(a: PlotArgs) -> Result<(), Failure> {
    let records = read_records(&a.input)?;
    let data = plot::series(&records, a.metric);
    if data.is_empty() {
        return Err(Failure(format!("no values of {} in {}", a.metric, a.input.display())));
    }
    let svg = plot::render_svg(&plot::PlotSpec::for_metric(a.metric), &data);
    emit(Some(&a.out), &svg)
}
