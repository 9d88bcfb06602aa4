//! Direct simulation of the averaging dynamics, used as independent oracles
//! for the closed forms.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{ConsensusSystem, NoiseModel};
use crate::error::{Error, Result};

/// Opinion vectors `x(0), …, x(horizon)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<Vec<f64>>,
    pub horizon: usize,
}

impl Trajectory {
    pub fn terminal(&self) -> &[f64] {
        self.states.last().expect("trajectory holds x(0)")
    }
}

/// Iterates `x(t+1) = W x(t)`.
pub fn simulate_consensus(sys: &ConsensusSystem, x0: &[f64], horizon: usize) -> Result<Trajectory> {
    if x0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: x0.len(),
        });
    }
    let mut states = Vec::with_capacity(horizon + 1);
    states.push(x0.to_vec());
    for t in 0..horizon {
        let next = sys.apply(&states[t]);
        states.push(next);
    }
    Ok(Trajectory { states, horizon })
}

/// Monte-Carlo estimate of the stationary `E Σ_i π_i (x_i - πᵀx)²` under
/// `x(t+1) = W x(t) + e(t)`, started from zero.
///
/// The first quarter of each run is discarded as burn-in; the rest is
/// averaged over time and replications.
pub fn simulate_noisy_consensus<R: Rng + ?Sized>(
    sys: &ConsensusSystem,
    noise: &NoiseModel,
    horizon: usize,
    replications: usize,
    rng: &mut R,
) -> Result<f64> {
    let n = sys.dim();
    let sd: Vec<f64> = noise.variances(n)?.into_iter().map(f64::sqrt).collect();
    if sd.iter().all(|&s| s == 0.0) || horizon == 0 || replications == 0 {
        return Ok(0.0);
    }
    let pi = sys.pi();
    let burn_in = horizon / 4;
    let mut total = 0.0;
    let mut count = 0usize;
    for _ in 0..replications {
        let mut x = vec![0.0; n];
        for t in 0..horizon {
            x = sys.apply(&x);
            for (xi, s) in x.iter_mut().zip(&sd) {
                let z: f64 = rng.sample(StandardNormal);
                *xi += s * z;
            }
            if t >= burn_in {
                let mean: f64 = x.iter().zip(pi).map(|(a, p)| a * p).sum();
                total += x.iter().zip(pi).map(|(a, p)| p * (a - mean).powi(2)).sum::<f64>();
                count += 1;
            }
        }
    }
    Ok(total / count as f64)
}

/// Mean number of steps for a walk driven by `W` to reach `target` from `source`.
pub fn simulate_hitting_time<R: Rng + ?Sized>(
    sys: &ConsensusSystem,
    source: usize,
    target: usize,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let n = sys.dim();
    if source >= n || target >= n {
        return Err(Error::InvalidParameter(format!(
            "nodes ({source}, {target}) out of range for {n} states"
        )));
    }
    if source == target {
        return Err(Error::InvalidParameter(
            "source and target must differ".into(),
        ));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let mut steps_total: u64 = 0;
    for _ in 0..samples {
        let mut state = source;
        while state != target {
            state = step(sys.row(state), rng);
            steps_total += 1;
        }
    }
    Ok(steps_total as f64 / samples as f64)
}

fn step<R: Rng + ?Sized>(row: &[(usize, f64)], rng: &mut R) -> usize {
    let mut u: f64 = rng.random();
    for &(j, w) in row {
        if u < w {
            return j;
        }
        u -= w;
    }
    row.last().expect("stochastic rows are non-empty").0
}
