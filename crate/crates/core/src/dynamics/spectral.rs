use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ConsensusSystem, Symmetrized};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::stream;

/// Seed of the fixed pseudo-random start used for deflated problems.
const DEFLATED_START_SEED: u64 = 0x5eed_0002;

/// Matrix-free square operator.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);
}

/// Adjacency operator of a graph.
impl LinearOperator for Graph {
    fn dim(&self) -> usize {
        self.node_count()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (u, o) in out.iter_mut().enumerate() {
            *o = self.neighbors(u).iter().map(|&v| x[v]).sum();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 100_000,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project_out(x: &mut [f64], unit: &[f64]) {
    let c = dot(x, unit);
    for (xi, ui) in x.iter_mut().zip(unit) {
        *xi -= c * ui;
    }
}

/// Largest eigenvalue modulus of a symmetric operator, optionally restricted
/// to the orthogonal complement of a unit vector.
///
/// The estimate is `‖M v‖` for the normalised iterate `v`, i.e. the square root
/// of the Rayleigh quotient of `M²`. It increases monotonically to the
/// dominant modulus and is immune to the `±λ` oscillation of bipartite
/// spectra. Iteration stops once both the last step and its extrapolated
/// remainder are within `tolerance · max(estimate, 1)`.
///
/// Undeflated runs start from `1 + 1e-6 (i + 1)`, which overlaps any
/// non-negative dominant vector. With deflation that start is nearly parallel
/// to the removed vector and can leave the wanted eigenvector with a weight
/// too small to surface before the estimate stalls (symmetric graphs such as
/// stars), so deflated runs start from a fixed pseudo-random vector instead.
pub fn dominant_modulus<M: LinearOperator + ?Sized>(
    op: &M,
    deflate: Option<&[f64]>,
    opts: PowerIteration,
) -> Result<f64> {
    let n = op.dim();
    let mut v: Vec<f64> = match deflate {
        None => (0..n).map(|i| 1.0 + 1e-6 * (i + 1) as f64).collect(),
        Some(u) => {
            let mut rng = stream(DEFLATED_START_SEED);
            let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            project_out(&mut v, u);
            v
        }
    };
    let norm = dot(&v, &v).sqrt();
    if norm == 0.0 {
        return Ok(0.0);
    }
    v.iter_mut().for_each(|x| *x /= norm);

    let mut w = vec![0.0; n];
    let mut previous = f64::NAN;
    let mut previous_step = f64::NAN;
    for iteration in 0..opts.max_iterations {
        op.apply(&v, &mut w);
        if let Some(u) = deflate {
            project_out(&mut w, u);
        }
        let estimate = dot(&w, &w).sqrt();
        if estimate == 0.0 {
            return Ok(0.0);
        }
        let step = estimate - previous;
        if iteration > 1 && converged(step, previous_step, opts.tolerance * estimate.max(1.0)) {
            return Ok(estimate);
        }
        previous = estimate;
        previous_step = step;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / estimate;
        }
    }
    Err(Error::IterationLimit(opts.max_iterations))
}

/// Stopping rule on the increasing estimate sequence: the step must be within
/// `tol`, and so must the geometric tail `step · r / (1 - r)` still to come,
/// with `r` the observed contraction of successive steps. Non-positive steps
/// mean rounding noise dominates and the sequence has converged.
fn converged(step: f64, previous_step: f64, tol: f64) -> bool {
    if step.abs() > tol {
        return false;
    }
    if step <= 0.0 || !(previous_step > 0.0) {
        return true;
    }
    let ratio = step / previous_step;
    ratio < 1.0 && step * ratio / (1.0 - ratio) <= tol
}

/// Dominant adjacency eigenvalue `λ_max`, equal to the spectral radius.
///
/// Power iteration first; when two weakly joined dense groups make the top
/// pair nearly degenerate and it exhausts its budget, Lanczos takes over.
pub fn spectral_radius(g: &Graph) -> Result<f64> {
    let opts = PowerIteration::default();
    match dominant_modulus(g, None, opts) {
        Err(Error::IterationLimit(_)) => {
            let (lo, hi) = super::lanczos::extreme_eigenvalues(g, None, opts)?;
            Ok(lo.abs().max(hi.abs()))
        }
        other => other,
    }
}

/// Second-largest eigenvalue modulus `ρ₂` of the consensus matrix.
///
/// Computed on the symmetrised matrix with the Perron vector `√π` deflated,
/// as the larger modulus of the two extreme eigenvalues found by Lanczos.
/// The leading non-trivial eigenvalues of tree-like group structures are
/// often nearly degenerate, which stalls plain power iteration.
pub fn second_eigenvalue_modulus(sys: &ConsensusSystem) -> Result<f64> {
    let (lo, hi) = super::lanczos::extreme_eigenvalues(
        &Symmetrized(sys),
        Some(sys.sqrt_pi()),
        PowerIteration::default(),
    )?;
    Ok(lo.abs().max(hi.abs()))
}

/// Steps for the consensus error to shrink by `1/e`: `1 / ln(1/ρ₂)`, and 0 at `ρ₂ = 0`.
pub fn convergence_time(rho2: f64) -> Result<f64> {
    if !(rho2 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue modulus {rho2} must be non-negative"
        )));
    }
    if rho2 >= 1.0 {
        return Err(Error::NonContracting(rho2));
    }
    if rho2 == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (1.0 / rho2).ln())
}

/// Early exponential growth rates of the linearised SI and SIS models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRates {
    pub si_rate: f64,
    pub sis_rate: f64,
}

pub fn propagation_growth_rates(lambda_max: f64, beta: f64, gamma: f64) -> Result<GrowthRates> {
    if !(beta > 0.0 && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "infection rate {beta} and recovery rate {gamma} must be positive"
        )));
    }
    Ok(GrowthRates {
        si_rate: beta * lambda_max,
        sis_rate: beta * lambda_max - gamma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub lambda_max: f64,
    pub rho2: f64,
    pub tau_asym: f64,
    pub si_rate: f64,
    pub sis_rate: f64,
}

pub fn spectral_report(
    g: &Graph,
    sys: &ConsensusSystem,
    beta: f64,
    gamma: f64,
) -> Result<SpectralReport> {
    let lambda_max = spectral_radius(g)?;
    let rho2 = second_eigenvalue_modulus(sys)?;
    let tau_asym = convergence_time(rho2)?;
    let rates = propagation_growth_rates(lambda_max, beta, gamma)?;
    Ok(SpectralReport {
        lambda_max,
        rho2,
        tau_asym,
        si_rate: rates.si_rate,
        sis_rate: rates.sis_rate,
    })
}
