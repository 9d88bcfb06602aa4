//! Lanczos iteration for the extreme eigenvalues of a symmetric operator.
//!
//! Used for `ρ₂`, where the two leading non-trivial eigenvalues of sparse
//! multi-group graphs are often so close that plain power iteration needs far
//! more than its iteration budget.

use rand::Rng;

use super::spectral::{LinearOperator, PowerIteration};
use crate::error::{Error, Result};
use crate::rng::stream;

const START_SEED: u64 = 0x5eed_0003;

/// Smallest and largest eigenvalue of a symmetric operator, restricted to the
/// orthogonal complement of `deflate` when given.
///
/// Runs Lanczos with full reorthogonalisation from a fixed pseudo-random
/// start. Both Ritz values are accepted once their residual bounds
/// `β_j |s_j|` fall below `tolerance · max(|θ|, 1)`; a Krylov breakdown or a
/// Krylov space spanning the whole (deflated) space yields exact values.
/// `max_iterations` caps the Krylov dimension.
pub fn extreme_eigenvalues<M: LinearOperator + ?Sized>(
    op: &M,
    deflate: Option<&[f64]>,
    opts: PowerIteration,
) -> Result<(f64, f64)> {
    let n = op.dim();
    let full_dim = n - usize::from(deflate.is_some() && n > 0);
    if full_dim == 0 {
        return Ok((0.0, 0.0));
    }
    let mut rng = stream(START_SEED);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    if !orthonormalise(&mut q, deflate, &basis) {
        return Ok((0.0, 0.0));
    }

    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let limit = opts.max_iterations.min(full_dim);
    loop {
        op.apply(&q, &mut w);
        let a = dot(&w, &q);
        alpha.push(a);
        basis.push(q);
        let j = basis.len();

        let breakdown = !orthonormalise(&mut w, deflate, &basis);
        let b = if breakdown { 0.0 } else { w_norm(&w) };
        let scale = alpha.iter().chain(&beta).fold(1.0f64, |m, v| m.max(v.abs()));
        let exhausted = breakdown || b <= 1e-13 * scale || j == full_dim;

        let lo = extreme(&alpha, &beta, false);
        let hi = extreme(&alpha, &beta, true);
        if exhausted {
            return Ok((lo, hi));
        }
        let settled = |theta: f64| {
            b * last_component(&alpha, &beta, theta).abs() <= opts.tolerance * theta.abs().max(1.0)
        };
        if settled(lo) && settled(hi) {
            return Ok((lo, hi));
        }
        if j >= limit {
            return Err(Error::IterationLimit(limit));
        }
        beta.push(b);
        q = w.iter().map(|x| x / b).collect();
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn w_norm(w: &[f64]) -> f64 {
    dot(w, w).sqrt()
}

fn subtract(x: &mut [f64], u: &[f64]) {
    let c = dot(x, u);
    for (xi, ui) in x.iter_mut().zip(u) {
        *xi -= c * ui;
    }
}

/// Two Gram–Schmidt passes against the deflated vector and the basis; in the
/// `basis.is_empty()` case also normalises. Returns `false` when nothing of
/// `x` survives.
fn orthonormalise(x: &mut [f64], deflate: Option<&[f64]>, basis: &[Vec<f64>]) -> bool {
    let before = w_norm(x);
    if before == 0.0 {
        return false;
    }
    for _ in 0..2 {
        if let Some(u) = deflate {
            subtract(x, u);
        }
        for v in basis {
            subtract(x, v);
        }
    }
    let after = w_norm(x);
    if after <= 1e-12 * before {
        return false;
    }
    if basis.is_empty() {
        x.iter_mut().for_each(|v| *v /= after);
    }
    true
}

/// Number of eigenvalues of the tridiagonal `(alpha, beta)` below `x`.
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (k, &a) in alpha.iter().enumerate() {
        let off = if k == 0 { 0.0 } else { beta[k - 1] * beta[k - 1] / q };
        q = a - x - off;
        if q == 0.0 {
            q = -f64::EPSILON * (a.abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest or smallest eigenvalue of the tridiagonal by bisection.
fn extreme(alpha: &[f64], beta: &[f64], largest: bool) -> f64 {
    let m = alpha.len();
    let radius = |k: usize| {
        let left = if k > 0 { beta[k - 1].abs() } else { 0.0 };
        let right = if k + 1 < m { beta[k].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..m).map(|k| alpha[k] - radius(k)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..m).map(|k| alpha[k] + radius(k)).fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let below = sturm_count(alpha, beta, mid);
        let go_down = if largest { below == m } else { below >= 1 };
        if go_down {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Last entry of the unit eigenvector of the tridiagonal for eigenvalue `theta`.
fn last_component(alpha: &[f64], beta: &[f64], theta: f64) -> f64 {
    let m = alpha.len();
    if m == 1 {
        return 1.0;
    }
    let diag: Vec<f64> = alpha.iter().map(|a| a - theta).collect();
    let mut y = vec![1.0 / (m as f64).sqrt(); m];
    for _ in 0..3 {
        solve_tridiagonal(beta, &diag, beta, &mut y);
        let norm = w_norm(&y);
        if !(norm.is_finite() && norm > 0.0) {
            return 1.0;
        }
        y.iter_mut().for_each(|v| *v /= norm);
    }
    y[m - 1]
}

/// Gaussian elimination with partial pivoting for a tridiagonal system
/// (`sub`, `diag`, `sup`), overwriting `rhs`. Zero pivots are nudged, which
/// is what inverse iteration wants.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    let mut dl = sub.to_vec();
    let scale = d.iter().chain(&du).fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            rhs[i + 1] -= fact * rhs[i];
            dl[i] = 0.0;
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = temp;
            let b = rhs[i];
            rhs[i] = rhs[i + 1];
            rhs[i + 1] = b - fact * rhs[i + 1];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    rhs[n - 1] /= d[n - 1];
    if n > 1 {
        rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - dl[i] * rhs[i + 2]) / d[i];
    }
}
