//! Model parameters and samplers.
//!
//! A sample is generated from latent node propensities `z_i ~ N(0, 1)` and
//! independent pair noise `y_ij ~ N(0, 1)`:
//!
//! ```text
//! W_ij = sqrt(1 - 2 rho) y_ij + sqrt(rho) (z_i + z_j)
//! ```
//!
//! `W` has unit variance, covariance `rho` between pairs that share a node and
//! zero covariance otherwise. A graph keeps the pair `(i, j)` whenever
//! `W_ij >= t`. At `rho = 1/2` the noise term vanishes and no `y_ij` is drawn.
//!
//! Random numbers are consumed in a fixed order: the `n` latent values first,
//! then one noise value per pair in row-major `(i, j)`, `i < j` order. The
//! naive graph sampler and [`sample_weights`] share that order, so
//! thresholding a weight matrix reproduces the graph drawn from the same seed.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{rng_from_seed, SampleRng};
use crate::specfun::norm_sf;

/// Values of `rho` this close to `1/2` are treated as exactly `1/2`.
pub const RHO_SNAP: f64 = 1e-12;

/// The triple `(n, t, rho)` describing one ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    n: usize,
    t: f64,
    rho: f64,
}

impl ModelParams {
    pub fn new(n: usize, t: f64, rho: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
        }
        if !t.is_finite() {
            return Err(Error::Domain { what: "t", value: t });
        }
        if !(0.0..=0.5).contains(&rho) {
            return Err(Error::Domain { what: "rho", value: rho });
        }
        let rho = if 0.5 - rho < RHO_SNAP { 0.5 } else { rho };
        Ok(ModelParams { n, t, rho })
    }

    /// Parameters whose threshold gives expected mean degree `mean_degree`.
    pub fn with_mean_degree(n: usize, mean_degree: f64, rho: f64) -> Result<Self> {
        let t = analytic::threshold_for_mean_degree(n, mean_degree)?;
        Self::new(n, t, rho)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Marginal edge probability `1 - Phi(t)`.
    pub fn edge_density(&self) -> f64 {
        norm_sf(self.t)
    }

    pub fn mean_degree(&self) -> f64 {
        (self.n - 1) as f64 * self.edge_density()
    }

    /// Coefficient of the pair noise, `sqrt(1 - 2 rho)`.
    fn noise_scale(&self) -> f64 {
        (1.0 - 2.0 * self.rho).max(0.0).sqrt()
    }
}

/// Latent node propensities `z_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentVector {
    z: Vec<f64>,
}

impl LatentVector {
    pub fn sample(n: usize, rng: &mut SampleRng) -> Self {
        LatentVector {
            z: (0..n).map(|_| rng.sample(StandardNormal)).collect(),
        }
    }

    pub fn from_values(z: Vec<f64>) -> Self {
        LatentVector { z }
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }

    /// Node contributions `sqrt(rho) z_i`.
    fn scaled(&self, rho: f64) -> Vec<f64> {
        let s = rho.sqrt();
        self.z.iter().map(|&z| s * z).collect()
    }
}

/// Upper-triangular store of the relational weights `X_ij`, `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    values: Vec<f64>,
}

#[inline]
fn pair_index(n: usize, i: usize, j: usize) -> usize {
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl WeightMatrix {
    /// Builds a matrix from its `n(n-1)/2` row-major upper-triangular entries.
    pub fn from_upper(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::InvalidParameter(format!(
                "expected {} upper-triangular entries for n = {n}, got {}",
                n * n.saturating_sub(1) / 2,
                values.len()
            )));
        }
        Ok(WeightMatrix { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major upper-triangular entries.
    pub fn upper(&self) -> &[f64] {
        &self.values
    }

    /// `X_ij` for `i != j`, in either order.
    ///
    /// # Panics
    ///
    /// On `i == j` or an index outside `0..n`.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        assert!(i != j && i < self.n && j < self.n, "invalid pair ({i}, {j})");
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.values[pair_index(self.n, a, b)]
    }

    /// Underlying degree `d_i = sum_{j != i} X_ij`.
    pub fn row_sum(&self, i: usize) -> Result<f64> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        Ok((0..self.n).filter(|&j| j != i).map(|j| self.value(i, j)).sum())
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        let mut k = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let x = self.values[k];
                sums[i] += x;
                sums[j] += x;
                k += 1;
            }
        }
        sums
    }

    /// Graph of all pairs with `X_ij >= t`.
    pub fn threshold(&self, t: f64) -> Graph {
        let mut edges = Vec::new();
        let mut k = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.values[k] >= t {
                    edges.push((i as u32, j as u32));
                }
                k += 1;
            }
        }
        Graph::from_sorted_unique(self.n, edges)
    }
}

/// Graph sampling strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    /// One noise draw per pair in row-major order.
    #[default]
    Naive,
    /// Geometric skipping over candidate pairs with thinning. Same
    /// distribution as [`SamplerKind::Naive`], but a different random stream,
    /// and far faster on sparse graphs.
    Skip,
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(SamplerKind::Naive),
            "skip" => Ok(SamplerKind::Skip),
            other => Err(Error::InvalidParameter(format!("unknown sampler {other:?}"))),
        }
    }
}

/// Draws a graph with the naive sampler.
pub fn sample_graph(params: &ModelParams, seed: u64) -> Graph {
    sample_graph_with(params, seed, SamplerKind::Naive)
}

pub fn sample_graph_with(params: &ModelParams, seed: u64, kind: SamplerKind) -> Graph {
    let mut rng = rng_from_seed(seed);
    let latent = LatentVector::sample(params.n, &mut rng);
    match kind {
        SamplerKind::Naive => naive_graph(params, &latent, &mut rng),
        SamplerKind::Skip => skip_graph(params, &latent, &mut rng),
    }
}

/// Draws a graph conditional on the given latent vector.
pub fn sample_graph_given(
    params: &ModelParams,
    latent: &LatentVector,
    rng: &mut SampleRng,
    kind: SamplerKind,
) -> Result<Graph> {
    if latent.len() != params.n {
        return Err(Error::InvalidParameter(format!(
            "latent vector has length {}, expected {}",
            latent.len(),
            params.n
        )));
    }
    Ok(match kind {
        SamplerKind::Naive => naive_graph(params, latent, rng),
        SamplerKind::Skip => skip_graph(params, latent, rng),
    })
}

/// Draws the full weight matrix for `seed`.
pub fn sample_weights(params: &ModelParams, seed: u64) -> WeightMatrix {
    let mut rng = rng_from_seed(seed);
    let latent = LatentVector::sample(params.n, &mut rng);
    let a = latent.scaled(params.rho);
    let c = params.noise_scale();
    let n = params.n;
    let mut values = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let w = if c > 0.0 {
                let y: f64 = rng.sample(StandardNormal);
                c * y + (a[i] + a[j])
            } else {
                a[i] + a[j]
            };
            values.push(w);
        }
    }
    WeightMatrix { n, values }
}

fn naive_graph(params: &ModelParams, latent: &LatentVector, rng: &mut SampleRng) -> Graph {
    let n = params.n;
    let t = params.t;
    let a = latent.scaled(params.rho);
    let c = params.noise_scale();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = if c > 0.0 {
                let y: f64 = rng.sample(StandardNormal);
                c * y + (a[i] + a[j])
            } else {
                a[i] + a[j]
            };
            if w >= t {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Graph::from_sorted_unique(n, edges)
}

/// Nodes are visited in decreasing order of `z`, so along each row the
/// conditional edge probability is non-increasing and the probability at the
/// current position bounds every later one.
fn skip_graph(params: &ModelParams, latent: &LatentVector, rng: &mut SampleRng) -> Graph {
    let n = params.n;
    let t = params.t;
    let c = params.noise_scale();
    let a = latent.scaled(params.rho);
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&u, &v| a[v as usize].total_cmp(&a[u as usize]).then(u.cmp(&v)));
    let sorted: Vec<f64> = order.iter().map(|&v| a[v as usize]).collect();

    let mut edges = Vec::new();
    let mut push = |p: usize, q: usize| {
        let (u, v) = (order[p], order[q]);
        edges.push(if u < v { (u, v) } else { (v, u) });
    };

    if c == 0.0 {
        for p in 0..n {
            let q_end = (p + 1..n)
                .find(|&q| sorted[p] + sorted[q] < t)
                .unwrap_or(n);
            if q_end == p + 1 {
                break;
            }
            for q in p + 1..q_end {
                push(p, q);
            }
        }
    } else {
        let prob = |p: usize, q: usize| norm_sf((t - (sorted[p] + sorted[q])) / c);
        for p in 0..n {
            let mut q = p + 1;
            while q < n {
                let bound = prob(p, q);
                if bound <= 0.0 {
                    break;
                }
                if bound >= 0.5 {
                    if rng.random::<f64>() < bound {
                        push(p, q);
                    }
                    q += 1;
                    continue;
                }
                let u: f64 = rng.random();
                let gap = ((-u).ln_1p() / (-bound).ln_1p()).floor();
                if gap >= (n - q) as f64 {
                    break;
                }
                q += gap as usize;
                let pq = if params.rho == 0.0 { bound } else { prob(p, q) };
                if rng.random::<f64>() * bound < pq {
                    push(p, q);
                }
                q += 1;
            }
        }
    }
    edges.sort_unstable();
    Graph::from_sorted_unique(n, edges)
}
