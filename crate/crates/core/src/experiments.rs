//! Seeded Monte-Carlo size sweeps and their summaries.
//!
//! Every replication `(size, rep)` gets its own stream seed hashed from the
//! master seed, so the output is a pure function of the configuration no
//! matter how many workers run it. The four modalities of one replication
//! share that seed and hence the same partition and group tree.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    convergence_time, noise_deviation, second_eigenvalue_modulus, spectral_radius,
    ConsensusSystem, NoiseModel,
};
use crate::error::{Error, Result};
use crate::generators::{generate, Modality, ModalityParams, MultiGroupGraph};
use crate::graph::Graph;
use crate::rng::derive_seed;

pub const CSV_HEADER: [&str; 13] = [
    "modality",
    "n_requested",
    "n_actual",
    "seed",
    "group_count",
    "avg_shortest_path",
    "avg_degree",
    "density",
    "clustering",
    "lambda_max",
    "rho2",
    "tau_asym",
    "delta_ss",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub replications: usize,
    pub modalities: Vec<Modality>,
    pub master_seed: u64,
    #[serde(default)]
    pub params: ModalityParams,
    #[serde(default)]
    pub noise: NoiseModel,
    /// Hitting-time metrics are computed only up to this many nodes.
    #[serde(default = "default_heavy_max")]
    pub heavy_metrics_max_n: usize,
}

fn default_heavy_max() -> usize {
    600
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            sizes: (1..=40).map(|i| 50 * i).collect(),
            replications: 100,
            modalities: Modality::ALL.to_vec(),
            master_seed: 0,
            params: ModalityParams::default(),
            noise: NoiseModel::default(),
            heavy_metrics_max_n: default_heavy_max(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidParameter("no sizes to sweep".into()));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "sizes must be strictly ascending".into(),
            ));
        }
        if self.sizes[0] < 3 {
            return Err(Error::InvalidParameter("sizes must be at least 3".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be positive".into()));
        }
        if self.modalities.is_empty() {
            return Err(Error::InvalidParameter("no modalities selected".into()));
        }
        self.params.validate()?;
        if let crate::dynamics::NoiseVariance::Uniform(s) = self.noise.sigma2 {
            if !(s >= 0.0) {
                return Err(Error::InvalidParameter("noise variance must be non-negative".into()));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Seed of replication `rep` at `size`, shared by every modality so the
    /// modalities are compared on identical partitions.
    pub fn replication_seed(&self, size: usize, rep: usize) -> u64 {
        derive_seed(self.master_seed, &[size as u64, rep as u64])
    }
}

/// Metrics of one successfully generated network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkMetrics {
    pub n_actual: usize,
    pub group_count: usize,
    pub avg_shortest_path: f64,
    pub avg_degree: f64,
    pub density: f64,
    pub clustering: f64,
    pub lambda_max: f64,
    pub rho2: f64,
    pub tau_asym: f64,
    pub delta_ss: Option<f64>,
}

impl NetworkMetrics {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::AvgShortestPath => Some(self.avg_shortest_path),
            Metric::AvgDegree => Some(self.avg_degree),
            Metric::Density => Some(self.density),
            Metric::Clustering => Some(self.clustering),
            Metric::LambdaMax => Some(self.lambda_max),
            Metric::Rho2 => Some(self.rho2),
            Metric::TauAsym => Some(self.tau_asym),
            Metric::DeltaSs => self.delta_ss,
        }
    }
}

/// Computes every record metric of a generated network.
pub fn compute_metrics(
    net: &MultiGroupGraph,
    noise: &NoiseModel,
    heavy_max_n: usize,
) -> Result<NetworkMetrics> {
    graph_metrics(&net.graph, net.group_count(), noise, heavy_max_n)
}

/// Record metrics of a bare graph; `delta_ss` only when the node count is at
/// most `heavy_max_n`.
pub fn graph_metrics(
    g: &Graph,
    group_count: usize,
    noise: &NoiseModel,
    heavy_max_n: usize,
) -> Result<NetworkMetrics> {
    let summary = g.structural_summary()?;
    let sys = ConsensusSystem::from_graph(g)?;
    let lambda_max = spectral_radius(g)?;
    let rho2 = second_eigenvalue_modulus(&sys)?;
    let tau_asym = convergence_time(rho2)?;
    let delta_ss = if g.node_count() <= heavy_max_n {
        Some(noise_deviation(&sys, noise)?)
    } else {
        None
    };
    Ok(NetworkMetrics {
        n_actual: g.node_count(),
        group_count,
        avg_shortest_path: summary.average_shortest_path,
        avg_degree: summary.average_degree,
        density: summary.density,
        clustering: summary.average_clustering,
        lambda_max,
        rho2,
        tau_asym,
        delta_ss,
    })
}

/// One sweep row. Failed replications keep their identity with `metrics: Err`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub modality: Modality,
    pub n_requested: usize,
    pub seed: u64,
    pub metrics: std::result::Result<NetworkMetrics, String>,
}

impl MetricsRecord {
    pub fn ok(&self) -> Option<&NetworkMetrics> {
        self.metrics.as_ref().ok()
    }
}

/// Record-level metrics that can be summarised, plotted or regressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    AvgShortestPath,
    AvgDegree,
    Density,
    Clustering,
    LambdaMax,
    Rho2,
    TauAsym,
    DeltaSs,
}

impl Metric {
    pub const ALL: [Metric; 8] = [
        Metric::AvgShortestPath,
        Metric::AvgDegree,
        Metric::Density,
        Metric::Clustering,
        Metric::LambdaMax,
        Metric::Rho2,
        Metric::TauAsym,
        Metric::DeltaSs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::AvgShortestPath => "avg_shortest_path",
            Metric::AvgDegree => "avg_degree",
            Metric::Density => "density",
            Metric::Clustering => "clustering",
            Metric::LambdaMax => "lambda_max",
            Metric::Rho2 => "rho2",
            Metric::TauAsym => "tau_asym",
            Metric::DeltaSs => "delta_ss",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

fn run_one(cfg: &SweepConfig, modality: Modality, size: usize, rep: usize) -> MetricsRecord {
    let seed = cfg.replication_seed(size, rep);
    let metrics = generate(modality, size, &cfg.params, seed)
        .and_then(|net| compute_metrics(&net, &cfg.noise, cfg.heavy_metrics_max_n))
        .map_err(|e| {
            warn!("{modality} n={size} rep={rep} seed={seed}: {e}");
            e.to_string()
        });
    MetricsRecord {
        modality,
        n_requested: size,
        seed,
        metrics,
    }
}

/// Runs the sweep on the global rayon pool.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<MetricsRecord>> {
    cfg.validate()?;
    Ok(tasks(cfg)
        .into_par_iter()
        .map(|(m, s, r)| run_one(cfg, m, s, r))
        .collect())
}

/// Runs the sweep on a dedicated pool of `workers` threads (1 = serial).
pub fn run_sweep_with_workers(cfg: &SweepConfig, workers: usize) -> Result<Vec<MetricsRecord>> {
    cfg.validate()?;
    if workers <= 1 {
        return Ok(tasks(cfg)
            .into_iter()
            .map(|(m, s, r)| run_one(cfg, m, s, r))
            .collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(pool.install(|| {
        tasks(cfg)
            .into_par_iter()
            .map(|(m, s, r)| run_one(cfg, m, s, r))
            .collect()
    }))
}

fn tasks(cfg: &SweepConfig) -> Vec<(Modality, usize, usize)> {
    let mut out = Vec::with_capacity(cfg.modalities.len() * cfg.sizes.len() * cfg.replications);
    for &m in &cfg.modalities {
        for &s in &cfg.sizes {
            for r in 0..cfg.replications {
                out.push((m, s, r));
            }
        }
    }
    out
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(records: &[MetricsRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let mut row = vec![
            r.modality.to_string(),
            r.n_requested.to_string(),
            String::new(),
            r.seed.to_string(),
        ];
        match &r.metrics {
            Ok(m) => {
                row[2] = m.n_actual.to_string();
                row.push(m.group_count.to_string());
                row.extend(Metric::ALL.iter().map(|&k| fmt_opt(m.get(k))));
            }
            Err(_) => row.extend(std::iter::repeat_n(String::new(), 9)),
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(records: &[MetricsRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

/// Reads records back; rows without `n_actual` are failed replications.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<MetricsRecord>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    let mut out = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row?;
        let field = |i: usize| row.get(i).unwrap_or("").trim();
        let bad = |what: &str| Error::Parse(format!("row {}: bad {what}", line + 2));
        let int = |i: usize, what: &str| field(i).parse::<usize>().map_err(|_| bad(what));
        let real = |i: usize, what: &str| -> Result<Option<f64>> {
            match field(i) {
                "" => Ok(None),
                s => s.parse::<f64>().map(Some).map_err(|_| bad(what)),
            }
        };
        let modality: Modality = field(0).parse()?;
        let n_requested = int(1, "n_requested")?;
        let seed = field(3).parse::<u64>().map_err(|_| bad("seed"))?;
        let metrics = if field(2).is_empty() {
            Err("failed replication".to_string())
        } else {
            let need = |i: usize, what: &str| real(i, what)?.ok_or_else(|| bad(what));
            Ok(NetworkMetrics {
                n_actual: int(2, "n_actual")?,
                group_count: int(4, "group_count")?,
                avg_shortest_path: need(5, "avg_shortest_path")?,
                avg_degree: need(6, "avg_degree")?,
                density: need(7, "density")?,
                clustering: need(8, "clustering")?,
                lambda_max: need(9, "lambda_max")?,
                rho2: need(10, "rho2")?,
                tau_asym: need(11, "tau_asym")?,
                delta_ss: real(12, "delta_ss")?,
            })
        };
        out.push(MetricsRecord {
            modality,
            n_requested,
            seed,
            metrics,
        });
    }
    Ok(out)
}

/// Mean and 95% confidence band of one metric for one `(modality, n)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub modality: Modality,
    pub n: usize,
    pub metric: String,
    pub mean: f64,
    /// Sample standard deviation; missing with a single replication.
    pub std_dev: Option<f64>,
    pub std_error: Option<f64>,
    /// `1.96 · sd / √reps`.
    pub ci95_half_width: Option<f64>,
    pub replications: usize,
}

/// Groups successful records by `(modality, n_requested)` and summarises
/// every metric with at least one value.
pub fn summarize(records: &[MetricsRecord]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(Modality, usize), Vec<&NetworkMetrics>> = BTreeMap::new();
    for r in records {
        if let Ok(m) = &r.metrics {
            cells.entry((r.modality, r.n_requested)).or_default().push(m);
        }
    }
    let mut rows = Vec::new();
    for ((modality, n), ms) in cells {
        for metric in Metric::ALL {
            let values: Vec<f64> = ms.iter().filter_map(|m| m.get(metric)).collect();
            if values.is_empty() {
                continue;
            }
            rows.push(summary_row(modality, n, metric.as_str(), &values));
        }
    }
    rows
}

pub fn summary_row(modality: Modality, n: usize, metric: &str, values: &[f64]) -> SummaryRow {
    let count = values.len();
    let mean = values.iter().sum::<f64>() / count as f64;
    let std_dev = (count > 1).then(|| {
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (count - 1) as f64).sqrt()
    });
    let std_error = std_dev.map(|sd| sd / (count as f64).sqrt());
    SummaryRow {
        modality,
        n,
        metric: metric.to_string(),
        mean,
        std_dev,
        std_error,
        ci95_half_width: std_error.map(|se| 1.96 * se),
        replications: count,
    }
}
