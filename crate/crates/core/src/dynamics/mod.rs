//! Spectral and Markov-chain analytics of propagation and consensus.
//!
//! The consensus matrix of a graph with adjacency `A` and degrees `D` is the
//! equal-neighbour averaging rule `W = (D + I)^-1 (A + I)`: every node weighs
//! itself and each neighbour by `1 / (d_i + 1)`. `W` is the transition matrix
//! of a reversible random walk with stationary law `π_i ∝ d_i + 1`, so the
//! similar matrix `S = D_π^{1/2} W D_π^{-1/2}` is symmetric and the spectrum
//! of `W` is real.

mod lanczos;
mod markov;
mod simulate;
mod spectral;

pub use markov::{
    fundamental_matrix, hitting_times, markov_report, noise_deviation, steady_state_deviation,
    HittingTimes, MarkovReport, NoiseModel, NoiseVariance,
};
pub use simulate::{
    simulate_consensus, simulate_hitting_time, simulate_noisy_consensus, Trajectory,
};
pub use spectral::{
    convergence_time, dominant_modulus, propagation_growth_rates, second_eigenvalue_modulus,
    spectral_radius, spectral_report, GrowthRates, LinearOperator, PowerIteration,
    SpectralReport,
};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;

const ROW_SUM_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;
const BALANCE_TOL: f64 = 1e-12;

/// Row-stochastic, reversible consensus matrix with its stationary law.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusSystem {
    /// Sparse rows `(column, weight)`, sorted by column.
    rows: Vec<Vec<(usize, f64)>>,
    pi: Vec<f64>,
    sqrt_pi: Vec<f64>,
}

impl ConsensusSystem {
    /// Equal-neighbour weights `W = (D + I)^-1 (A + I)` of a connected graph.
    pub fn from_graph(g: &Graph) -> Result<Self> {
        let n = g.node_count();
        if n == 0 {
            return Err(Error::InvalidGraph("empty graph".into()));
        }
        if !g.is_connected() {
            return Err(Error::Reducible);
        }
        let rows: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| {
                let w = 1.0 / (g.degree(i) + 1) as f64;
                let mut row: Vec<(usize, f64)> =
                    g.neighbors(i).iter().map(|&j| (j, w)).collect();
                let at = row.partition_point(|&(j, _)| j < i);
                row.insert(at, (i, w));
                row
            })
            .collect();
        let mass = (n + 2 * g.edge_count()) as f64;
        let pi = (0..n).map(|i| (g.degree(i) + 1) as f64 / mass).collect();
        Self::checked(rows, pi)
    }

    /// The two-step chain `W²`; reversible with the same stationary law.
    pub fn two_step(&self) -> Result<Self> {
        let n = self.dim();
        let mut acc = vec![0.0; n];
        let mut touched = Vec::new();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for &(k, w_ik) in row {
                    for &(j, w_kj) in &self.rows[k] {
                        if acc[j] == 0.0 {
                            touched.push(j);
                        }
                        acc[j] += w_ik * w_kj;
                    }
                }
                touched.sort_unstable();
                let out: Vec<(usize, f64)> = touched.iter().map(|&j| (j, acc[j])).collect();
                for &j in &touched {
                    acc[j] = 0.0;
                }
                touched.clear();
                out
            })
            .collect();
        Self::checked(rows, self.pi.clone())
    }

    fn checked(rows: Vec<Vec<(usize, f64)>>, pi: Vec<f64>) -> Result<Self> {
        let sqrt_pi = pi.iter().map(|p: &f64| p.sqrt()).collect();
        let sys = Self { rows, pi, sqrt_pi };
        sys.validate()?;
        Ok(sys)
    }

    /// Checks stochasticity, stationarity and detailed balance.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        for (i, row) in self.rows.iter().enumerate() {
            if row.iter().any(|&(_, w)| !(w >= 0.0)) {
                return Err(Error::InvalidParameter(format!("row {i} has a negative weight")));
            }
            let sum: f64 = row.iter().map(|&(_, w)| w).sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidParameter(format!("row {i} sums to {sum}")));
            }
        }
        let total: f64 = self.pi.iter().sum();
        if (total - 1.0).abs() > STATIONARY_TOL {
            return Err(Error::InvalidParameter(format!("stationary law sums to {total}")));
        }
        let flow = self.apply_transpose(&self.pi);
        let residual = flow
            .iter()
            .zip(&self.pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual > STATIONARY_TOL {
            return Err(Error::InvalidParameter(format!(
                "stationarity residual {residual:e}"
            )));
        }
        for i in 0..n {
            for &(j, w_ij) in &self.rows[i] {
                let gap = (self.pi[i] * w_ij - self.pi[j] * self.entry(j, i)).abs();
                if gap > BALANCE_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "detailed balance violated at ({i}, {j}) by {gap:e}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let row = &self.rows[i];
        row.binary_search_by_key(&j, |&(c, _)| c)
            .map(|at| row[at].1)
            .unwrap_or(0.0)
    }

    /// `W x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, w)| w * x[j]).sum())
            .collect()
    }

    /// `Wᵀ x`.
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                out[j] += w * x[i];
            }
        }
        out
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                m[(i, j)] = w;
            }
        }
        m
    }

    /// Dense `S = D_π^{1/2} W D_π^{-1/2}`.
    pub fn symmetrized_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                m[(i, j)] = self.sqrt_pi[i] * w / self.sqrt_pi[j];
            }
        }
        m
    }

    /// Unit eigenvector of `S` for the eigenvalue 1.
    pub fn sqrt_pi(&self) -> &[f64] {
        &self.sqrt_pi
    }
}

/// `S` as a matrix-free operator.
#[derive(Debug, Clone, Copy)]
pub struct Symmetrized<'a>(pub &'a ConsensusSystem);

impl LinearOperator for Symmetrized<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let sys = self.0;
        for (i, row) in sys.rows.iter().enumerate() {
            let s: f64 = row
                .iter()
                .map(|&(j, w)| w * x[j] / sys.sqrt_pi[j])
                .sum();
            out[i] = sys.sqrt_pi[i] * s;
        }
    }
}
