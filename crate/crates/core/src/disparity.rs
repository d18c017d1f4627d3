//! Disparity filter applied to the exponentiated weights `exp(X_ij)`.
//!
//! For node `i` with strengths `s_ij = exp(X_ij)`, the score of edge `(i, j)`
//! is the probability, under uniform random allocation of `i`'s total strength
//! over its `n - 1` pairs, that a pair receives at least the observed share:
//!
//! ```text
//! alpha_ij = (1 - s_ij / sum_k s_ik)^(n - 2)
//! ```
//!
//! Small scores mark significant edges. An edge is kept when it is significant
//! from either endpoint, i.e. `min(alpha_ij, alpha_ji) < alpha`, so the
//! filtered graph grows with `alpha`: empty as `alpha -> 0`, complete as
//! `alpha -> 1`.
//!
//! The mean-field density replaces each row sum by its expectation, giving
//!
//! ```text
//! E[A_ij] = 1 - E_x[Phi(c - x sqrt(1/rho - 2))^2],
//! c = (2 ln((n - 2)(alpha^(-1/(n-2)) - 1)) + (1 - rho)) / (2 sqrt(rho))
//! ```

use serde::{Deserialize, Serialize};

use crate::ensemble::{sample_weights, ModelParams, WeightMatrix};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::specfun::{gauss_hermite_rule, norm_cdf, norm_sf, phi};

/// Parameters of a filtered ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisparityParams {
    n: usize,
    rho: f64,
    alpha: f64,
}

impl DisparityParams {
    pub fn new(n: usize, rho: f64, alpha: f64) -> Result<Self> {
        check(n, alpha, rho)?;
        Ok(DisparityParams { n, rho, alpha })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

fn check(n: usize, alpha: f64, rho: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n must be at least 3, got {n}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain { what: "alpha", value: alpha });
    }
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::Domain { what: "rho", value: rho });
    }
    Ok(())
}

/// Dense `n x n` matrix of scores `alpha_ij`; the diagonal is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaScores {
    n: usize,
    values: Vec<f64>,
}

impl AlphaScores {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Score of pair `(i, j)` seen from `i`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i != j, "diagonal score requested");
        self.values[i * self.n + j]
    }

    /// Graph keeping `(i, j)` whenever `min(alpha_ij, alpha_ji) < alpha`.
    pub fn filter(&self, alpha: f64) -> Graph {
        let n = self.n;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.values[i * n + j].min(self.values[j * n + i]) < alpha {
                    edges.push((i as u32, j as u32));
                }
            }
        }
        Graph::from_sorted_unique(n, edges)
    }
}

/// Scores of every pair. Each row is shifted by its maximum before
/// exponentiation.
pub fn alpha_scores(w: &WeightMatrix) -> Result<AlphaScores> {
    let n = w.n();
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n must be at least 3, got {n}")));
    }
    let power = (n - 2) as f64;
    let mut values = vec![f64::NAN; n * n];
    let mut shifted = vec![0.0; n];
    for i in 0..n {
        let row_max = (0..n)
            .filter(|&j| j != i)
            .map(|j| w.value(i, j))
            .fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            shifted[j] = (w.value(i, j) - row_max).exp();
            total += shifted[j];
        }
        for j in (0..n).filter(|&j| j != i) {
            values[i * n + j] = (power * (-shifted[j] / total).ln_1p()).exp();
        }
    }
    Ok(AlphaScores { n, values })
}

/// Filters `w` at significance level `alpha`.
pub fn apply_filter(w: &WeightMatrix, alpha: f64) -> Result<Graph> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain { what: "alpha", value: alpha });
    }
    Ok(alpha_scores(w)?.filter(alpha))
}

/// Draws a weight matrix for `(n, rho)` and filters it.
pub fn sample_filtered_graph(params: &DisparityParams, seed: u64) -> Result<Graph> {
    let model = ModelParams::new(params.n, 0.0, params.rho)?;
    apply_filter(&sample_weights(&model, seed), params.alpha)
}

/// `c` as a function of `ln alpha`, with its derivative.
fn c_and_slope(n: usize, ln_alpha: f64, rho: f64) -> (f64, f64) {
    let m = (n - 2) as f64;
    let g = m * (-ln_alpha / m).exp_m1();
    let c = (2.0 * g.ln() + (1.0 - rho)) / (2.0 * rho.sqrt());
    let dc = -(-ln_alpha / m).exp() / (rho.sqrt() * g);
    (c, dc)
}

/// Mean-field constant `c`.
pub fn meanfield_c(n: usize, alpha: f64, rho: f64) -> Result<f64> {
    check(n, alpha, rho)?;
    Ok(c_and_slope(n, alpha.ln(), rho).0)
}

/// Density and its derivative with respect to `ln alpha`.
fn density_and_slope(n: usize, ln_alpha: f64, rho: f64, order: usize) -> Result<(f64, f64)> {
    let rule = gauss_hermite_rule(order)?;
    let (c, dc) = c_and_slope(n, ln_alpha, rho);
    let b = (1.0 / rho - 2.0).sqrt();
    let clamp = |u: f64| u.clamp(-40.0, 40.0);
    let density = rule.expect(|x| {
        let u = clamp(c - x * b);
        norm_sf(u) * (1.0 + norm_cdf(u))
    });
    let d_dc = -rule.expect(|x| {
        let u = clamp(c - x * b);
        2.0 * norm_cdf(u) * phi(u)
    });
    Ok((density, d_dc * dc))
}

/// Mean-field edge density of the filtered ensemble.
pub fn disparity_edge_density(n: usize, alpha: f64, rho: f64, order: usize) -> Result<f64> {
    check(n, alpha, rho)?;
    Ok(density_and_slope(n, alpha.ln(), rho, order)?.0)
}

pub const ALPHA_MIN: f64 = 1e-12;
pub const ALPHA_MAX: f64 = 1.0 - 1e-12;

/// Significance level whose mean-field mean degree is `target_mean_degree`.
pub fn solve_alpha(n: usize, rho: f64, target_mean_degree: f64, order: usize) -> Result<f64> {
    check(n, 0.5, rho)?;
    let m = (n - 1) as f64;
    if !(target_mean_degree > 0.0 && target_mean_degree < m) {
        return Err(Error::Domain {
            what: "target mean degree",
            value: target_mean_degree,
        });
    }
    let target = target_mean_degree / m;
    let resid = |la: f64| -> Result<(f64, f64)> {
        let (d, s) = density_and_slope(n, la, rho, order)?;
        Ok((d - target, s))
    };
    let (mut lo, mut hi) = (ALPHA_MIN.ln(), ALPHA_MAX.ln());
    let (r_lo, r_hi) = (resid(lo)?.0, resid(hi)?.0);
    if r_lo > 0.0 || r_hi < 0.0 {
        return Err(Error::RootNotFound(format!(
            "mean degree {target_mean_degree} is outside [{}, {}] reachable for alpha in [{ALPHA_MIN}, {ALPHA_MAX}]",
            (r_lo + target) * m,
            (r_hi + target) * m
        )));
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if resid(mid)?.0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut la = 0.5 * (lo + hi);
    for _ in 0..50 {
        let (r, s) = resid(la)?;
        if r.abs() <= 1e-12 * target {
            break;
        }
        if r < 0.0 {
            lo = la;
        } else {
            hi = la;
        }
        let step = la - r / s;
        la = if s > 0.0 && step > lo && step < hi {
            step
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(la.exp())
}
