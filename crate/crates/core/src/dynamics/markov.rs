use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ConsensusSystem;
use crate::error::{Error, Result};

/// Per-node noise variances: one value for every node, or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseVariance {
    Uniform(f64),
    PerNode(Vec<f64>),
}

/// Diagonal noise covariance `Σ_e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma2: NoiseVariance,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

impl NoiseModel {
    pub fn uniform(sigma2: f64) -> Self {
        Self {
            sigma2: NoiseVariance::Uniform(sigma2),
        }
    }

    /// Variances for an `n`-node network.
    pub fn variances(&self, n: usize) -> Result<Vec<f64>> {
        let v = match &self.sigma2 {
            NoiseVariance::Uniform(s) => vec![*s; n],
            NoiseVariance::PerNode(v) if v.len() == n => v.clone(),
            NoiseVariance::PerNode(v) => {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                })
            }
        };
        if v.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(Error::InvalidParameter("noise variances must be non-negative".into()));
        }
        Ok(v)
    }
}

/// Kemeny–Snell fundamental matrix and mean first-passage times.
#[derive(Debug, Clone, PartialEq)]
pub struct HittingTimes {
    /// `Z = (I - W + 𝟙πᵀ)^-1`.
    pub fundamental: DMatrix<f64>,
    /// `H_ij` = expected steps to first reach `j` from `i`; zero diagonal.
    pub hitting: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovReport {
    pub fundamental: DMatrix<f64>,
    pub hitting: DMatrix<f64>,
    pub delta_ss: f64,
}

/// `Z = (I - W + 𝟙πᵀ)^-1` by LU with partial pivoting.
pub fn fundamental_matrix(sys: &ConsensusSystem) -> Result<DMatrix<f64>> {
    let n = sys.dim();
    let pi = sys.pi();
    let mut m = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + pi[j]);
    for i in 0..n {
        for &(j, w) in sys.row(i) {
            m[(i, j)] -= w;
        }
    }
    let z = m.lu().try_inverse().ok_or(Error::Singular)?;
    if z.iter().any(|x| !x.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(z)
}

/// `H_ij = (Z_jj - Z_ij) / π_j` for `i ≠ j`.
pub fn hitting_times(sys: &ConsensusSystem) -> Result<HittingTimes> {
    let z = fundamental_matrix(sys)?;
    let pi = sys.pi();
    let n = sys.dim();
    let h = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            (z[(j, j)] - z[(i, j)]) / pi[j]
        }
    });
    Ok(HittingTimes {
        fundamental: z,
        hitting: h,
    })
}

/// Quadratic form `πᵀ H D_π Σ_e D_π 𝟙`.
pub fn steady_state_deviation(
    sys: &ConsensusSystem,
    hitting: &DMatrix<f64>,
    noise: &NoiseModel,
) -> Result<f64> {
    let n = sys.dim();
    if hitting.nrows() != n || hitting.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: hitting.nrows(),
        });
    }
    let sigma2 = noise.variances(n)?;
    let pi = sys.pi();
    // D_π Σ_e D_π 𝟙
    let weights: Vec<f64> = (0..n).map(|j| pi[j] * sigma2[j] * pi[j]).collect();
    let total = (0..n)
        .map(|i| {
            let row: f64 = (0..n).map(|j| hitting[(i, j)] * weights[j]).sum();
            pi[i] * row
        })
        .sum();
    Ok(total)
}

/// Steady-state mean-square deviation `E Σ_i π_i (x_i - πᵀx)²` of the noisy
/// recursion `x(t+1) = W x(t) + e(t)`.
///
/// The deviation process is driven by `W` once per step, so its stationary
/// covariance sums only even powers of `W`; the hitting-time form above
/// evaluates it exactly when fed the hitting times of the two-step chain `W²`.
/// For idempotent `W` (complete graphs) both chains coincide.
pub fn noise_deviation(sys: &ConsensusSystem, noise: &NoiseModel) -> Result<f64> {
    let two_step = sys.two_step()?;
    let times = hitting_times(&two_step)?;
    steady_state_deviation(&two_step, &times.hitting, noise)
}

/// Fundamental matrix and hitting times of `W`, plus the noise deviation.
pub fn markov_report(sys: &ConsensusSystem, noise: &NoiseModel) -> Result<MarkovReport> {
    let times = hitting_times(sys)?;
    let delta_ss = noise_deviation(sys, noise)?;
    Ok(MarkovReport {
        fundamental: times.fundamental,
        hitting: times.hitting,
        delta_ss,
    })
}
