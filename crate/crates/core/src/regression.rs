//! Ordinary least squares on sweep records.
//!
//! The model regresses one metric on network size, average degree, modality
//! indicators (bridge is the baseline) and squared size.

use std::fmt::{self, Write as _};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::experiments::{Metric, MetricsRecord};
use crate::generators::Modality;

pub const REGRESSOR_NAMES: [&str; 7] = [
    "Constant",
    "N",
    "Degree",
    "Edge-bundle",
    "Co-membership",
    "Liaison",
    "N^2",
];

/// Design matrix and response assembled from records.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub response: Vec<f64>,
    /// Records without a value for the response (failed or gated).
    pub skipped: usize,
}

pub fn design_row(modality: Modality, n: usize, degree: f64) -> Vec<f64> {
    let n = n as f64;
    let flag = |m: Modality| if modality == m { 1.0 } else { 0.0 };
    vec![
        1.0,
        n,
        degree,
        flag(Modality::EdgeBundle),
        flag(Modality::Comembership),
        flag(Modality::Liaison),
        n * n,
    ]
}

/// Builds the design for `response`; N is the actual node count.
pub fn build_design(records: &[MetricsRecord], response: Metric) -> Design {
    let mut rows = Vec::new();
    let mut y = Vec::new();
    let mut skipped = 0;
    for r in records {
        match r.ok().and_then(|m| m.get(response).map(|v| (m, v))) {
            Some((m, v)) => {
                rows.push(design_row(r.modality, m.n_actual, m.avg_degree));
                y.push(v);
            }
            None => skipped += 1,
        }
    }
    Design {
        names: REGRESSOR_NAMES.iter().map(|s| s.to_string()).collect(),
        rows,
        response: y,
        skipped,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub response: String,
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r_squared: f64,
    pub observations: usize,
    pub residual_df: usize,
}

impl FitResult {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(self.coefficients[i])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

impl fmt::Display for FitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = format!(
            "response: {}\n{:<14} {:>14} {:>14} {:>10} {:>10}\n",
            self.response, "", "coefficient", "std. error", "t", "p"
        );
        for i in 0..self.names.len() {
            writeln!(
                out,
                "{:<14} {:>14.6e} {:>14.6e} {:>10.3} {:>10.4}",
                self.names[i],
                self.coefficients[i],
                self.standard_errors[i],
                self.t_stats[i],
                self.p_values[i]
            )?;
        }
        write!(
            out,
            "observations: {}  residual df: {}  R^2: {:.4}",
            self.observations, self.residual_df, self.r_squared
        )?;
        f.write_str(&out)
    }
}

/// Two-sided p-value of a t statistic with `df` degrees of freedom.
pub fn two_sided_p(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t))
}

/// Least squares fit of `y` on the columns of `x`.
///
/// Columns are centred (when the first column is a constant intercept) and
/// scaled to unit norm before a QR solve, which keeps the N and N² columns
/// well conditioned; estimates and covariance are mapped back to the
/// original parameterisation.
pub fn fit_ols(names: &[String], x: &[Vec<f64>], y: &[f64], response: &str) -> Result<FitResult> {
    let rows = x.len();
    let cols = names.len();
    if y.len() != rows {
        return Err(Error::DimensionMismatch {
            expected: rows,
            got: y.len(),
        });
    }
    if let Some(bad) = x.iter().find(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch {
            expected: cols,
            got: bad.len(),
        });
    }
    if rows <= cols {
        return Err(Error::Underdetermined { rows, cols });
    }
    let raw = DMatrix::from_fn(rows, cols, |i, j| x[i][j]);
    let yv = DVector::from_column_slice(y);

    // beta = T * beta_t where the transformed design is X_t = X T^{-1}.
    let intercept = cols > 0 && raw.column(0).iter().all(|&v| v == 1.0);
    let mut means = vec![0.0; cols];
    let mut scales = vec![1.0; cols];
    let mut xt = raw.clone();
    for j in 0..cols {
        if intercept && j > 0 {
            means[j] = raw.column(j).mean();
            xt.column_mut(j).add_scalar_mut(-means[j]);
        }
        let norm = xt.column(j).norm();
        if norm == 0.0 {
            return Err(Error::Collinear(format!("column `{}` is constant", names[j])));
        }
        scales[j] = norm;
        xt.column_mut(j).unscale_mut(norm);
    }

    let qr = xt.clone().qr();
    let r = qr.r();
    let r_max = r.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for j in 0..cols {
        if r[(j, j)].abs() <= 1e-10 * r_max {
            return Err(Error::Collinear(format!(
                "column `{}` is linearly dependent on the others",
                names[j]
            )));
        }
    }
    let qty = qr.q().transpose() * &yv;
    let beta_t = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::Singular)?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(cols, cols))
        .ok_or(Error::Singular)?;
    let cov_t = &r_inv * r_inv.transpose();

    let fitted = &xt * &beta_t;
    let residuals = &yv - fitted;
    let rss = residuals.norm_squared();
    let df = rows - cols;
    let sigma2 = rss / df as f64;

    // T maps transformed coefficients back: beta_j = beta_t_j / s_j for j > 0,
    // beta_0 = beta_t_0 / s_0 - sum_j means_j beta_j.
    let mut transform = DMatrix::zeros(cols, cols);
    for j in 0..cols {
        transform[(j, j)] = 1.0 / scales[j];
    }
    if intercept {
        for j in 1..cols {
            transform[(0, j)] = -means[j] / scales[j];
        }
    }
    let beta = &transform * &beta_t;
    let cov = &transform * cov_t * transform.transpose() * sigma2;

    let y_mean = yv.mean();
    let tss: f64 = yv.iter().map(|v| (v - y_mean).powi(2)).sum();
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };

    let standard_errors: Vec<f64> = (0..cols).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    let t_stats: Vec<f64> = (0..cols)
        .map(|j| match standard_errors[j] {
            se if se > 0.0 => beta[j] / se,
            _ if beta[j] == 0.0 => 0.0,
            _ => f64::INFINITY.copysign(beta[j]),
        })
        .collect();
    let p_values = t_stats.iter().map(|&t| two_sided_p(t, df as f64)).collect();

    Ok(FitResult {
        response: response.to_string(),
        names: names.to_vec(),
        coefficients: beta.iter().copied().collect(),
        standard_errors,
        t_stats,
        p_values,
        r_squared,
        observations: rows,
        residual_df: df,
    })
}

/// Fits the seven-regressor model for `response` on sweep records.
pub fn fit_metric(records: &[MetricsRecord], response: Metric) -> Result<FitResult> {
    let design = build_design(records, response);
    fit_ols(&design.names, &design.rows, &design.response, response.as_str())
}
