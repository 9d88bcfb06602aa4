//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use multigroup::dynamics::{
    convergence_time, hitting_times, noise_deviation, second_eigenvalue_modulus,
    simulate_hitting_time, simulate_noisy_consensus, spectral_radius, NoiseModel,
};
use multigroup::experiments::{
    run_sweep_with_workers, summarize, to_csv_string, MetricsRecord, SummaryRow, SweepConfig,
};
use multigroup::generators::{generate, uniform_spanning_tree, Modality, ModalityParams};
use multigroup::regression::fit_metric;
use multigroup::experiments::Metric;
use multigroup::rng::stream;
use multigroup::Graph;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const DESK_SIZES: [usize; 5] = [100, 200, 300, 400, 500];
const DESK_REPS: usize = 30;
const RUNTIME_LIMIT: Duration = Duration::from_secs(120);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

struct Desk {
    records: Vec<MetricsRecord>,
    cells: HashMap<(Modality, usize, String), SummaryRow>,
    elapsed: Duration,
}

impl Desk {
    fn run() -> Self {
        let cfg = SweepConfig {
            sizes: DESK_SIZES.to_vec(),
            replications: DESK_REPS,
            ..SweepConfig::default()
        };
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
        let start = Instant::now();
        let records = run_sweep_with_workers(&cfg, workers).expect("valid sweep configuration");
        let elapsed = start.elapsed();
        let cells = summarize(&records)
            .into_iter()
            .map(|r| ((r.modality, r.n, r.metric.clone()), r))
            .collect();
        Self {
            records,
            cells,
            elapsed,
        }
    }

    fn cell(&self, m: Modality, n: usize, metric: Metric) -> &SummaryRow {
        &self.cells[&(m, n, metric.as_str().to_string())]
    }

    fn mean(&self, m: Modality, n: usize, metric: Metric) -> f64 {
        self.cell(m, n, metric).mean
    }

    fn interval(&self, m: Modality, n: usize, metric: Metric) -> (f64, f64) {
        let c = self.cell(m, n, metric);
        let h = c.ci95_half_width.unwrap_or(0.0);
        (c.mean - h, c.mean + h)
    }

    fn means_at(&self, n: usize, metric: Metric) -> String {
        Modality::ALL
            .iter()
            .map(|&m| format!("{m}={:.4}", self.mean(m, n, metric)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn intervals_at(&self, n: usize, metric: Metric) -> String {
        Modality::ALL
            .iter()
            .map(|&m| {
                let (lo, hi) = self.interval(m, n, metric);
                format!("{m}=[{lo:.3},{hi:.3}]")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn arg_extreme(&self, n: usize, metric: Metric, largest: bool) -> Modality {
        let key = |m: &Modality| self.mean(*m, n, metric);
        let it = Modality::ALL.into_iter();
        if largest {
            it.max_by(|a, b| key(a).total_cmp(&key(b))).unwrap()
        } else {
            it.min_by(|a, b| key(a).total_cmp(&key(b))).unwrap()
        }
    }
}

fn overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

fn criterion_degree_order(desk: &Desk) -> Outcome {
    let order = [
        Modality::Comembership,
        Modality::EdgeBundle,
        Modality::Bridge,
        Modality::Liaison,
    ];
    let mut failures = Vec::new();
    for &n in DESK_SIZES.iter().filter(|&&n| n >= 200) {
        let ordered = order
            .windows(2)
            .all(|w| desk.mean(w[0], n, Metric::AvgDegree) > desk.mean(w[1], n, Metric::AvgDegree));
        if !ordered {
            failures.push(format!("order broken at n={n} ({})", desk.means_at(n, Metric::AvgDegree)));
        }
    }
    let mut overlapping = Vec::new();
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            if overlap(desk.interval(a, 500, Metric::AvgDegree), desk.interval(b, 500, Metric::AvgDegree)) {
                overlapping.push(format!("{a}/{b}"));
            }
        }
    }
    if !overlapping.is_empty() {
        failures.push(format!(
            "overlapping 95% CIs at n=500: {} ({})",
            overlapping.join(", "),
            desk.intervals_at(500, Metric::AvgDegree)
        ));
    }
    if desk.elapsed > RUNTIME_LIMIT {
        failures.push(format!("sweep took {:.1?}", desk.elapsed));
    }
    let summary = format!(
        "means at n=500: {}; sweep runtime {:.1?}",
        desk.means_at(500, Metric::AvgDegree),
        desk.elapsed
    );
    if failures.is_empty() {
        Outcome::new(true, summary)
    } else {
        Outcome::new(false, format!("{}; {summary}", failures.join("; ")))
    }
}

fn criterion_path_length(desk: &Desk) -> Outcome {
    let metric = Metric::AvgShortestPath;
    let top = desk.arg_extreme(500, metric, true);
    let others = [Modality::Bridge, Modality::EdgeBundle, Modality::Comembership];
    let mut separated = Vec::new();
    for (i, &a) in others.iter().enumerate() {
        for &b in &others[i + 1..] {
            if !overlap(desk.interval(a, 500, metric), desk.interval(b, 500, metric)) {
                separated.push(format!("{a}/{b}"));
            }
        }
    }
    let pass = top == Modality::Liaison && separated.is_empty();
    let mut detail = format!("largest mean at n=500: {top}; {}", desk.intervals_at(500, metric));
    if !separated.is_empty() {
        detail.push_str(&format!("; non-overlapping among the other three: {}", separated.join(", ")));
    }
    Outcome::new(pass, detail)
}

fn criterion_convergence_order(desk: &Desk) -> Outcome {
    let metric = Metric::TauAsym;
    let slowest = desk.arg_extreme(500, metric, true);
    let fastest = desk.arg_extreme(500, metric, false);
    Outcome::new(
        slowest == Modality::Bridge && fastest == Modality::Liaison,
        format!(
            "largest {slowest}, smallest {fastest} at n=500 ({})",
            desk.means_at(500, metric)
        ),
    )
}

fn criterion_noise_order(desk: &Desk) -> Outcome {
    let metric = Metric::DeltaSs;
    let top = desk.arg_extreme(500, metric, true);
    Outcome::new(
        top == Modality::Bridge,
        format!("largest {top} at n=500 ({})", desk.means_at(500, metric)),
    )
}

fn criterion_regression_signs(desk: &Desk) -> Outcome {
    // (response, regressor, required sign)
    let targets: [(Metric, &str, f64); 10] = [
        (Metric::LambdaMax, "Degree", 1.0),
        (Metric::LambdaMax, "Co-membership", -1.0),
        (Metric::TauAsym, "Degree", -1.0),
        (Metric::TauAsym, "Edge-bundle", -1.0),
        (Metric::TauAsym, "Co-membership", -1.0),
        (Metric::TauAsym, "Liaison", -1.0),
        (Metric::DeltaSs, "Degree", -1.0),
        (Metric::DeltaSs, "Edge-bundle", -1.0),
        (Metric::DeltaSs, "Co-membership", -1.0),
        (Metric::DeltaSs, "Liaison", -1.0),
    ];
    let mut fits = BTreeMap::new();
    for metric in [Metric::LambdaMax, Metric::TauAsym, Metric::DeltaSs] {
        match fit_metric(&desk.records, metric) {
            Ok(fit) => {
                fits.insert(metric, fit);
            }
            Err(e) => return Outcome::new(false, format!("{metric} fit failed: {e}")),
        }
    }
    let mut wrong = Vec::new();
    let mut shown = Vec::new();
    for (metric, name, sign) in targets {
        let c = fits[&metric].coefficient(name).expect("regressor present");
        shown.push(format!("{metric}:{name}={c:.4e}"));
        if c * sign <= 0.0 {
            wrong.push(format!("{metric}:{name}"));
        }
    }
    let detail = if wrong.is_empty() {
        shown.join(" ")
    } else {
        format!("wrong sign for {}; {}", wrong.join(", "), shown.join(" "))
    };
    Outcome::new(wrong.is_empty(), detail)
}

fn criterion_closed_forms() -> Outcome {
    let params = ModalityParams::default();
    let mut worst_pi: f64 = 0.0;
    for i in 0..100usize {
        let modality = Modality::ALL[i % 4];
        let g = generate(modality, 20 + i, &params, 1000 + i as u64).unwrap().graph;
        let sys = common::system(&g);
        let solved = common::stationary_by_solve(&common::consensus_dense(&g));
        let denom = (g.node_count() + 2 * g.edge_count()) as f64;
        for v in 0..g.node_count() {
            let closed = (g.degree(v) + 1) as f64 / denom;
            worst_pi = worst_pi.max((sys.pi()[v] - closed).abs()).max((solved[v] - closed).abs());
        }
    }

    let k2 = common::system(&Graph::complete(2));
    let k3 = common::system(&Graph::complete(3));
    let unit = NoiseModel::uniform(1.0);
    let rho2_path = second_eigenvalue_modulus(&common::system(&Graph::path(3))).unwrap();
    let checks: [(&str, f64, f64); 8] = [
        ("H(K2)", hitting_times(&k2).unwrap().hitting[(0, 1)], 2.0),
        ("H(K3)", hitting_times(&k3).unwrap().hitting[(0, 1)], 3.0),
        ("delta_ss(K2)", noise_deviation(&k2, &unit).unwrap(), 0.5),
        ("delta_ss(K3)", noise_deviation(&k3, &unit).unwrap(), 2.0 / 3.0),
        ("rho2(path-3)", rho2_path, 0.5),
        ("tau(0.5)", convergence_time(0.5).unwrap(), 1.0 / 2f64.ln()),
        ("lambda_max(K5)", spectral_radius(&Graph::complete(5)).unwrap(), 4.0),
        ("lambda_max(star-4)", spectral_radius(&Graph::star(3)).unwrap(), 3f64.sqrt()),
    ];
    let mut bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| (got - want).abs() > 1e-9)
        .map(|(name, got, want)| format!("{name}={got} (want {want})"))
        .collect();
    if worst_pi > 1e-12 {
        bad.push(format!("pi deviates by {worst_pi:e}"));
    }
    let detail = format!("max |pi - closed form| over 100 graphs {worst_pi:.2e}; {} constants checked", checks.len());
    if bad.is_empty() {
        Outcome::new(true, detail)
    } else {
        Outcome::new(false, format!("{}; {detail}", bad.join(", ")))
    }
}

fn criterion_simulation_oracles() -> Outcome {
    let mut bad = Vec::new();

    let five = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (1, 3)]).unwrap();
    let sys = common::system(&five);
    let h = hitting_times(&sys).unwrap().hitting;
    let mut rng = stream(71);
    let mut worst_hit: f64 = 0.0;
    for s in 0..5 {
        for t in 0..5 {
            if s == t {
                continue;
            }
            let mc = simulate_hitting_time(&sys, s, t, 1_000_000, &mut rng).unwrap();
            worst_hit = worst_hit.max((mc - h[(s, t)]).abs() / h[(s, t)]);
        }
    }
    if worst_hit > 0.02 {
        bad.push(format!("hitting time off by {:.2}%", 100.0 * worst_hit));
    }

    let twenty = generate(Modality::Bridge, 20, &ModalityParams::default(), 20).unwrap().graph;
    let sys = common::system(&twenty);
    let noise = NoiseModel::uniform(1.0);
    let analytic = noise_deviation(&sys, &noise).unwrap();
    let simulated = simulate_noisy_consensus(&sys, &noise, 200_000, 5, &mut stream(72)).unwrap();
    let noise_err = (simulated - analytic).abs() / analytic;
    if noise_err > 0.05 {
        bad.push(format!("delta_ss {analytic} vs simulated {simulated}"));
    }

    let mut rng = stream(73);
    let mut worst_lambda: f64 = 0.0;
    let mut worst_rho: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(2..=8);
        let p = rng.random_range(0.2..0.9);
        let g = common::random_connected_graph(n, p, &mut rng);
        let lambda = spectral_radius(&g).unwrap();
        worst_lambda = worst_lambda.max((lambda - common::dense_spectral_radius(&g)).abs());
        let rho2 = second_eigenvalue_modulus(&common::system(&g)).unwrap();
        worst_rho = worst_rho.max((rho2 - common::dense_rho2(&g)).abs());
    }
    if worst_lambda > 1e-8 || worst_rho > 1e-8 {
        bad.push(format!("eigenvalue error lambda {worst_lambda:e}, rho2 {worst_rho:e}"));
    }

    let detail = format!(
        "hitting worst rel err {:.3}%, delta_ss rel err {:.2}% ({analytic:.5} vs {simulated:.5}), \
         eigen worst abs err lambda {worst_lambda:.1e} rho2 {worst_rho:.1e}",
        100.0 * worst_hit,
        100.0 * noise_err
    );
    if bad.is_empty() {
        Outcome::new(true, detail)
    } else {
        Outcome::new(false, format!("{}; {detail}", bad.join(", ")))
    }
}

fn criterion_generator_invariants() -> Outcome {
    let params = ModalityParams::default();
    let mut bad = Vec::new();
    for modality in Modality::ALL {
        for seed in 0..1000u64 {
            let n = 3 + (seed as usize % 298);
            let result = generate(modality, n, &params, seed)
                .map_err(|e| e.to_string())
                .and_then(|net| common::check_network(&net, n));
            if let Err(msg) = result {
                bad.push(format!("{modality} n={n} seed={seed}: {msg}"));
            }
        }
    }

    let mut rng = stream(81);
    let mut counts: BTreeMap<Vec<(usize, usize)>, usize> = BTreeMap::new();
    let draws = 16_000;
    for _ in 0..draws {
        let mut edges: Vec<(usize, usize)> = uniform_spanning_tree(4, &mut rng)
            .edges
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        *counts.entry(edges).or_default() += 1;
    }
    let expected = draws as f64 / 16.0;
    let stat: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum::<f64>()
        + (16 - counts.len().min(16)) as f64 * expected;
    let p = 1.0 - ChiSquared::new(15.0).unwrap().cdf(stat);
    if counts.len() != 16 {
        bad.push(format!("{} distinct trees on 4 labels", counts.len()));
    }
    if p <= 0.001 {
        bad.push(format!("Pruefer chi-square p = {p}"));
    }
    let detail = format!("4000 generated networks checked; tree chi-square {stat:.2} (p = {p:.3})");
    if bad.is_empty() {
        Outcome::new(true, detail)
    } else {
        let shown: Vec<_> = bad.iter().take(5).cloned().collect();
        Outcome::new(false, format!("{} violations, e.g. {}; {detail}", bad.len(), shown.join("; ")))
    }
}

fn criterion_determinism() -> Outcome {
    let cfg = SweepConfig {
        sizes: vec![50, 100, 150],
        replications: 4,
        master_seed: 99,
        ..SweepConfig::default()
    };
    let csv = |workers| to_csv_string(&run_sweep_with_workers(&cfg, workers).unwrap()).unwrap();
    let serial = csv(1);
    let again = csv(1);
    let parallel = csv(8);
    let rows = serial.lines().count() - 1;
    Outcome::new(
        serial == again && serial == parallel,
        format!(
            "{rows} rows, {} bytes; serial repeat identical: {}; 8 workers identical: {}",
            serial.len(),
            serial == again,
            serial == parallel
        ),
    )
}

fn main() {
    let desk = Desk::run();
    let failed_reps = desk.records.iter().filter(|r| r.metrics.is_err()).count();
    println!(
        "desk sweep: sizes {DESK_SIZES:?}, {DESK_REPS} replications, {} records ({failed_reps} failed), {:.1?}",
        desk.records.len(),
        desk.elapsed
    );

    let outcomes = [
        ("degree ordering", criterion_degree_order(&desk)),
        ("path-length separation", criterion_path_length(&desk)),
        ("convergence-time ordering", criterion_convergence_order(&desk)),
        ("noise-deviation ordering", criterion_noise_order(&desk)),
        ("regression signs", criterion_regression_signs(&desk)),
        ("closed-form oracles", criterion_closed_forms()),
        ("simulation oracles", criterion_simulation_oracles()),
        ("generator invariants", criterion_generator_invariants()),
        ("determinism", criterion_determinism()),
    ];
    let mut failures = 0;
    for (i, (name, outcome)) in outcomes.iter().enumerate() {
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {verdict} {name}: {}", i + 1, outcome.detail);
        failures += usize::from(!outcome.pass);
    }
    println!("{} of {} criteria passed", outcomes.len() - failures, outcomes.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
