//! Ensemble statistics in closed or semi-analytic form.
//!
//! Orthant probabilities of the correlated edge weights are expanded in
//! Hermite series. With normalised polynomials `h_k = H_k / sqrt(k!)`:
//!
//! ```text
//! P[X_ij >= t, X_ik >= t] = sum_N rho^N (phi(t) h_{N-1}(t))^2 / N
//! ```
//!
//! where the `N = 0` term is `(1 - Phi(t))^2`. The triangle probability is the
//! analogous triple sum. The degree distribution is an integral over the
//! latent propensity of a node, evaluated with Gauss-Hermite quadrature centred
//! on the maximum of the integrand.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{
    gauss_hermite_rule, hermite_normalized_row, ln_binomial, ln_factorial, log_norm_cdf,
    log_norm_sf, mills_ratio, norm_cdf, norm_cdf_inv, norm_hazard, norm_sf, phi,
    QuadratureRule,
};

/// Below this `rho` the degree distribution is the exact binomial.
pub const RHO_BINOMIAL_CUTOFF: f64 = 1e-10;

pub const DEFAULT_QUADRATURE_ORDER: usize = 40;

/// Consecutive sub-tolerance terms required to stop a series.
const QUIET_TERMS: usize = 3;

/// Truncation rule for the Hermite series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub abs_tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            max_terms: 200,
            abs_tol: 1e-12,
        }
    }
}

impl SeriesControl {
    pub fn new(max_terms: usize, abs_tol: f64) -> Result<Self> {
        if max_terms < 1 {
            return Err(Error::InvalidParameter("max_terms must be at least 1".into()));
        }
        if !(abs_tol > 0.0) {
            return Err(Error::Domain { what: "abs_tol", value: abs_tol });
        }
        Ok(SeriesControl { max_terms, abs_tol })
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if (0.0..=0.5).contains(&rho) {
        Ok(())
    } else {
        Err(Error::Domain { what: "rho", value: rho })
    }
}

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what: "t", value: t })
    }
}

/// `P[X_ij >= t] = 1 - Phi(t)`.
pub fn edge_density(t: f64) -> f64 {
    norm_sf(t)
}

/// Expected degree `(n - 1)(1 - Phi(t))`, the same for every `rho`.
pub fn mean_degree(n: usize, t: f64) -> f64 {
    n.saturating_sub(1) as f64 * edge_density(t)
}

/// Threshold giving expected degree `k`: `t = Phi^{-1}(1 - k / (n - 1))`.
pub fn threshold_for_mean_degree(n: usize, k: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    let m = (n - 1) as f64;
    if !(k > 0.0 && k < m) {
        return Err(Error::Domain { what: "mean degree", value: k });
    }
    Ok(-norm_cdf_inv(k / m)?)
}

/// Sums `term(N)` for `N = 1, 2, ...` until `QUIET_TERMS` consecutive terms
/// fall below the tolerance.
fn sum_series(ctl: &SeriesControl, start: f64, mut term: impl FnMut(usize) -> f64) -> Result<f64> {
    let mut sum = start;
    let mut quiet = 0;
    for n in 1..=ctl.max_terms {
        let x = term(n);
        sum += x;
        if x.abs() < ctl.abs_tol {
            quiet += 1;
            if quiet >= QUIET_TERMS {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence {
        terms: ctl.max_terms,
        partial: sum,
    })
}

/// `sum_{N >= 1} rho^N (phi h_{N-1})^2 / N`, the correlated part of the
/// two-star probability.
fn two_star_excess(t: f64, rho: f64, ctl: &SeriesControl) -> Result<f64> {
    if rho == 0.0 {
        return Ok(0.0);
    }
    let h = hermite_normalized_row(ctl.max_terms, t);
    let p = phi(t);
    let mut pow = 1.0;
    sum_series(ctl, 0.0, |n| {
        pow *= rho;
        let g = p * h[n - 1];
        pow * g * g / n as f64
    })
}

/// Probability that two edges sharing a node are both present.
pub fn two_star_prob(t: f64, rho: f64, ctl: &SeriesControl) -> Result<f64> {
    check_t(t)?;
    check_rho(rho)?;
    let base = norm_sf(t).powi(2);
    match two_star_excess(t, rho, ctl) {
        Ok(s) => Ok(base + s),
        Err(Error::NonConvergence { terms, partial }) => Err(Error::NonConvergence {
            terms,
            partial: base + partial,
        }),
        Err(e) => Err(e),
    }
}

/// Probability that all three edges of a node triple are present.
pub fn triangle_prob(t: f64, rho: f64, ctl: &SeriesControl) -> Result<f64> {
    check_t(t)?;
    check_rho(rho)?;
    let sf = norm_sf(t);
    if rho == 0.0 {
        return Ok(sf.powi(3));
    }
    let max = ctl.max_terms;
    let h = hermite_normalized_row(max, t);
    let p = phi(t);
    let hm1 = mills_ratio(t);
    // Entries are indexed by order + 1 so that order -1 sits at slot 0.
    let hh: Vec<f64> = std::iter::once(hm1).chain(h.iter().copied()).collect();
    let half_lf: Vec<f64> = std::iter::once(0.0)
        .chain((0..=max).map(|k| 0.5 * ln_factorial(k)))
        .collect();
    let lf: Vec<f64> = (0..=max).map(ln_factorial).collect();
    let p3 = p * p * p;
    let ln_rho = rho.ln();
    sum_series(ctl, sf.powi(3), |n| {
        let mut block = 0.0;
        let base = n as f64 * ln_rho;
        for i in 0..=n {
            for j in 0..=n - i {
                let m = n - i - j;
                let (a, b, c) = (n - i, n - j, i + j);
                let lw = base + half_lf[a] + half_lf[b] + half_lf[c] - lf[i] - lf[j] - lf[m];
                block += hh[a] * hh[b] * hh[c] * lw.exp();
            }
        }
        p3 * block
    })
}

fn scale_partial(err: Error, factor: f64) -> Error {
    match err {
        Error::NonConvergence { terms, partial } => Error::NonConvergence {
            terms,
            partial: partial * factor,
        },
        other => other,
    }
}

/// Clustering coefficient `P[triangle] / P[two-star]`.
pub fn clustering(t: f64, rho: f64, ctl: &SeriesControl) -> Result<f64> {
    let two = two_star_prob(t, rho, ctl)?;
    if !(two > f64::MIN_POSITIVE) {
        return Err(Error::Unreliable(format!(
            "two-star probability underflows at t = {t}"
        )));
    }
    triangle_prob(t, rho, ctl)
        .map(|tri| tri / two)
        .map_err(|e| scale_partial(e, 1.0 / two))
}

/// Expected triangles per node, `C(n-1, 2) P[triangle]`.
pub fn triangles_per_node(n: usize, t: f64, rho: f64, ctl: &SeriesControl) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n must be at least 3, got {n}")));
    }
    let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
    triangle_prob(t, rho, ctl)
        .map(|tri| pairs * tri)
        .map_err(|e| scale_partial(e, pairs))
}

/// Degree variance: the binomial part plus `(n-1)(n-2)` times the two-star
/// excess.
pub fn degree_variance(n: usize, t: f64, rho: f64, ctl: &SeriesControl) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    check_t(t)?;
    check_rho(rho)?;
    let m = (n - 1) as f64;
    let base = m * norm_cdf(t) * norm_sf(t);
    let pairs = m * (n - 2) as f64;
    two_star_excess(t, rho, ctl)
        .map(|s| base + pairs * s)
        .map_err(|e| match e {
            Error::NonConvergence { terms, partial } => Error::NonConvergence {
                terms,
                partial: base + pairs * partial,
            },
            other => other,
        })
}

/// Derivative of [`degree_variance`] with respect to `rho`.
pub fn degree_variance_drho(n: usize, t: f64, rho: f64, ctl: &SeriesControl) -> Result<f64> {
    check_t(t)?;
    check_rho(rho)?;
    let pairs = (n.saturating_sub(1) * n.saturating_sub(2)) as f64;
    let h = hermite_normalized_row(ctl.max_terms, t);
    let p = phi(t);
    let mut pow = 1.0;
    sum_series(ctl, 0.0, |n| {
        if n > 1 {
            pow *= rho;
        }
        let g = p * h[n - 1];
        pow * g * g
    })
    .map(|s| pairs * s)
    .map_err(|e| scale_partial(e, pairs))
}

/// How a [`DegreeDistribution`] was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "method")]
pub enum DegreeMethod {
    Quadrature { order: usize },
    Laplace,
    Binomial,
}

impl std::fmt::Display for DegreeMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DegreeMethod::Quadrature { order } => write!(f, "quadrature(order={order})"),
            DegreeMethod::Laplace => f.write_str("laplace"),
            DegreeMethod::Binomial => f.write_str("binomial"),
        }
    }
}

/// Probabilities `p_0, ..., p_{n-1}` of the degree of a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    pub n: usize,
    pub probs: Vec<f64>,
    pub method: DegreeMethod,
    /// `|1 - sum p_k|`.
    pub residual: f64,
}

impl DegreeDistribution {
    fn new(n: usize, probs: Vec<f64>, method: DegreeMethod) -> Self {
        let residual = (1.0 - probs.iter().sum::<f64>()).abs();
        DegreeDistribution {
            n,
            probs,
            method,
            residual,
        }
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - m).powi(2) * p)
            .sum()
    }

    /// Writes the `k,p_k` table.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "k,p_k")?;
        for (k, p) in self.probs.iter().enumerate() {
            writeln!(out, "{k},{p:e}")?;
        }
        Ok(())
    }
}

/// `Binomial(m, p)` probabilities for `0..=m`.
pub fn binomial_pmf(m: usize, p: f64) -> Vec<f64> {
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    (0..=m)
        .map(|k| {
            if p == 0.0 {
                return if k == 0 { 1.0 } else { 0.0 };
            }
            if p == 1.0 {
                return if k == m { 1.0 } else { 0.0 };
            }
            (ln_binomial(m, k) + k as f64 * lp + (m - k) as f64 * lq).exp()
        })
        .collect()
}

fn binomial_distribution(n: usize, t: f64) -> DegreeDistribution {
    let m = n - 1;
    let (lp, lq) = (log_norm_sf(t), log_norm_cdf(t));
    let probs = (0..=m)
        .map(|k| (ln_binomial(m, k) + k as f64 * lp + (m - k) as f64 * lq).exp())
        .collect();
    DegreeDistribution::new(n, probs, DegreeMethod::Binomial)
}

/// Log-integrand of the degree-`k` probability,
/// `f(y) = k ln(1 - Phi(y)) + (n-1-k) ln Phi(y) - (t - sqrt(1-rho) y)^2 / (2 rho)`,
/// with its first two derivatives. `f` is strictly concave.
struct LogIntegrand {
    k: f64,
    rest: f64,
    t: f64,
    s: f64,
    rho: f64,
}

impl LogIntegrand {
    fn value(&self, y: f64) -> f64 {
        let mut v = -(self.t - self.s * y).powi(2) / (2.0 * self.rho);
        if self.k > 0.0 {
            v += self.k * log_norm_sf(y);
        }
        if self.rest > 0.0 {
            v += self.rest * log_norm_cdf(y);
        }
        v
    }

    fn derivs(&self, y: f64) -> (f64, f64) {
        let mut d1 = self.s * (self.t - self.s * y) / self.rho;
        let mut d2 = -self.s * self.s / self.rho;
        if self.k > 0.0 {
            let lam = norm_hazard(y);
            d1 -= self.k * lam;
            d2 -= self.k * lam * (lam - y);
        }
        if self.rest > 0.0 {
            let mu = norm_hazard(-y);
            d1 += self.rest * mu;
            d2 -= self.rest * mu * (mu + y);
        }
        (d1, d2)
    }

    /// Maximiser of `f`: bracket the root of `f'` outward from `start`, then
    /// Newton steps that fall back to bisection when they leave the bracket.
    fn argmax(&self, start: f64) -> Option<f64> {
        let slope = |y: f64| self.derivs(y).0;
        let (mut lo, mut hi) = (start - 0.5, start + 0.5);
        let mut width = 1.0;
        while slope(lo) <= 0.0 {
            lo -= width;
            width *= 2.0;
            if lo < -1e4 {
                return None;
            }
        }
        width = 1.0;
        while slope(hi) >= 0.0 {
            hi += width;
            width *= 2.0;
            if hi > 1e4 {
                return None;
            }
        }
        let mut y = start.clamp(lo, hi);
        for _ in 0..200 {
            let (d1, d2) = self.derivs(y);
            if d1 == 0.0 {
                return Some(y);
            }
            if d1 > 0.0 {
                lo = y;
            } else {
                hi = y;
            }
            let mut next = y - d1 / d2;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - y).abs() <= 1e-14 * (1.0 + y.abs()) || hi - lo <= 1e-14 * (1.0 + y.abs()) {
                return Some(next);
            }
            y = next;
        }
        Some(y)
    }
}

/// Starting point `Phi^{-1}(1 - k/(n-1))`, nudged inward at the endpoints.
fn laplace_point(n: usize, k: usize) -> f64 {
    let m = (n - 1) as f64;
    let q = (k as f64).clamp(0.5, m - 0.5) / m;
    -norm_cdf_inv(q).unwrap_or(0.0)
}

fn quadrature_pk(n: usize, t: f64, rho: f64, k: usize, rule: &QuadratureRule) -> Result<f64> {
    let f = LogIntegrand {
        k: k as f64,
        rest: (n - 1 - k) as f64,
        t,
        s: (1.0 - rho).sqrt(),
        rho,
    };
    let y0 = f
        .argmax(laplace_point(n, k))
        .ok_or_else(|| Error::RootNotFound(format!("no maximum bracketed for k = {k}")))?;
    let f0 = f.value(y0);
    let a = -f.derivs(y0).1;
    if !(a > 0.0 && f0.is_finite()) {
        return Err(Error::Unreliable(format!("degenerate integrand at k = {k}")));
    }
    let scale = a.sqrt().recip();
    let correction: f64 = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&x, &w)| {
            let dy = x * scale;
            let r = f.value(y0 + dy) - f0 + 0.5 * a * dy * dy;
            w * r.exp()
        })
        .sum();
    let log_prefactor = ln_binomial(n - 1, k)
        + f0
        + 0.5 * ((1.0 - rho) / (2.0 * std::f64::consts::PI * rho * a)).ln();
    Ok(log_prefactor.exp() * correction)
}

/// Degree distribution by Gauss-Hermite quadrature of the given order.
///
/// For `rho` below [`RHO_BINOMIAL_CUTOFF`] the exact binomial is returned.
pub fn degree_distribution(n: usize, t: f64, rho: f64, order: usize) -> Result<DegreeDistribution> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    check_t(t)?;
    check_rho(rho)?;
    if rho < RHO_BINOMIAL_CUTOFF {
        return Ok(binomial_distribution(n, t));
    }
    let rule = gauss_hermite_rule(order)?;
    let probs = (0..n)
        .into_par_iter()
        .map(|k| quadrature_pk(n, t, rho, k, &rule))
        .collect::<Result<Vec<f64>>>()?;
    Ok(DegreeDistribution::new(
        n,
        probs,
        DegreeMethod::Quadrature { order },
    ))
}

/// Large-`n` asymptotic degree distribution, with `p_0 = p_{n-1} = 0`.
pub fn degree_distribution_laplace(n: usize, t: f64, rho: f64) -> Result<DegreeDistribution> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    check_t(t)?;
    check_rho(rho)?;
    if rho <= 0.0 {
        return Err(Error::Domain { what: "rho", value: rho });
    }
    let m = (n - 1) as f64;
    let pre = ((1.0 - rho) / rho).sqrt() / m;
    let (b2, b1, b0) = (
        -(1.0 - 2.0 * rho) / (2.0 * rho),
        t * (1.0 - rho).sqrt() / rho,
        -t * t / (2.0 * rho),
    );
    let probs = (0..n)
        .map(|k| {
            if k == 0 || k == n - 1 {
                return Ok(0.0);
            }
            let y0 = -norm_cdf_inv(k as f64 / m)?;
            Ok(pre * (b2 * y0 * y0 + b1 * y0 + b0).exp())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(DegreeDistribution::new(n, probs, DegreeMethod::Laplace))
}

/// The closed-form statistics of one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSummary {
    pub n: usize,
    pub t: f64,
    pub rho: f64,
    pub edge_density: f64,
    pub mean_degree: f64,
    pub two_star_prob: f64,
    pub triangle_prob: f64,
    pub clustering: f64,
    pub triangles_per_node: f64,
    pub degree_variance: f64,
}

/// All summary statistics; any series failure is returned as an error.
pub fn summarize(n: usize, t: f64, rho: f64, ctl: &SeriesControl) -> Result<AnalyticSummary> {
    let (summary, notes) = summarize_lenient(n, t, rho, ctl)?;
    match notes.into_iter().next() {
        None => Ok(summary),
        Some((_, err)) => Err(err),
    }
}

/// Like [`summarize`], but a truncated series contributes its partial sum and
/// is reported alongside the summary as `(field, error)`.
pub fn summarize_lenient(
    n: usize,
    t: f64,
    rho: f64,
    ctl: &SeriesControl,
) -> Result<(AnalyticSummary, Vec<(&'static str, Error)>)> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n must be at least 3, got {n}")));
    }
    check_t(t)?;
    check_rho(rho)?;
    let mut notes = Vec::new();
    let mut take = |field: &'static str, r: Result<f64>| -> Result<f64> {
        match r {
            Ok(v) => Ok(v),
            Err(e) => match e.partial() {
                Some(v) => {
                    notes.push((field, e));
                    Ok(v)
                }
                None => Err(e),
            },
        }
    };
    let two = take("two_star_prob", two_star_prob(t, rho, ctl))?;
    let tri = take("triangle_prob", triangle_prob(t, rho, ctl))?;
    let var = take("degree_variance", degree_variance(n, t, rho, ctl))?;
    if !(two > f64::MIN_POSITIVE) {
        return Err(Error::Unreliable(format!(
            "two-star probability underflows at t = {t}"
        )));
    }
    let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
    Ok((
        AnalyticSummary {
            n,
            t,
            rho,
            edge_density: edge_density(t),
            mean_degree: mean_degree(n, t),
            two_star_prob: two,
            triangle_prob: tri,
            clustering: tri / two,
            triangles_per_node: pairs * tri,
            degree_variance: var,
        },
        notes,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctl() -> SeriesControl {
        SeriesControl::default()
    }

    #[test]
    fn density_and_threshold() {
        assert_eq!(edge_density(0.0), 0.5);
        assert!(edge_density(8.0) < 1e-14);
        assert!((edge_density(1.6448536270) - 0.05).abs() < 1e-10);
        assert!((mean_degree(101, 0.0) - 50.0).abs() < 1e-12);
        assert!(threshold_for_mean_degree(101, 50.0).unwrap().abs() < 1e-12);
        let t = threshold_for_mean_degree(2001, 4.0).unwrap();
        assert!((t - 2.8781617390954834).abs() < 1e-8, "{t}");
        assert!((mean_degree(2001, t) - 4.0).abs() < 1e-3);
        for &(n, k) in &[(100usize, 5.0), (100_000, 100.0)] {
            let t = threshold_for_mean_degree(n, k).unwrap();
            assert!((mean_degree(n, t) / k - 1.0).abs() < 1e-9);
        }
        assert!(threshold_for_mean_degree(100, 0.0).is_err());
        assert!(threshold_for_mean_degree(100, 99.0).is_err());
    }

    #[test]
    fn independent_limits() {
        for &t in &[-1.0, 0.0, 0.7, 3.0] {
            let p = norm_sf(t);
            assert_eq!(two_star_prob(t, 0.0, &ctl()).unwrap(), p * p);
            assert!((triangle_prob(t, 0.0, &ctl()).unwrap() - p.powi(3)).abs() < 1e-15);
            assert!((clustering(t, 0.0, &ctl()).unwrap() - p).abs() < 1e-14);
            let v = degree_variance(50, t, 0.0, &ctl()).unwrap();
            assert!((v - 49.0 * p * (1.0 - p)).abs() < 1e-12);
        }
    }

    #[test]
    fn orthant_identities_at_half() {
        assert!((two_star_prob(0.0, 0.5, &ctl()).unwrap() - 1.0 / 3.0).abs() < 1e-9);
        assert!((triangle_prob(0.0, 0.5, &ctl()).unwrap() - 0.25).abs() < 1e-8);
        assert!((clustering(0.0, 0.5, &ctl()).unwrap() - 0.75).abs() < 1e-8);
    }

    #[test]
    fn series_match_integral_oracle() {
        // 1-D integrals of the orthant probabilities conditional on the shared
        // latent value, evaluated with mpmath at 30 digits.
        let cases = [
            (1.0, 0.3, 0.045457848515603964, 0.017767238499379816),
            (2.878, 0.45, 0.00010763466884150657, 1.7330810328830358e-05),
            (0.0, 0.3, 0.29849334201033917, 0.19774001301550873),
        ];
        for &(t, rho, two, tri) in &cases {
            let a = two_star_prob(t, rho, &ctl()).unwrap();
            let b = triangle_prob(t, rho, &ctl()).unwrap();
            assert!((a / two - 1.0).abs() < 1e-6, "two-star {t} {rho}: {a} vs {two}");
            assert!((b / tri - 1.0).abs() < 1e-6, "triangle {t} {rho}: {b} vs {tri}");
        }
    }

    #[test]
    fn variance_identity_and_monotonicity() {
        let n = 500;
        let t = threshold_for_mean_degree(n, 4.0).unwrap();
        let mut prev = (0.0, 0.0);
        for i in 0..=20 {
            let rho = 0.025 * i as f64;
            let two = two_star_prob(t, rho, &ctl()).unwrap();
            let var = degree_variance(n, t, rho, &ctl()).unwrap();
            let k = mean_degree(n, t);
            let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
            let alt = 2.0 * pairs * two + k - k * k;
            assert!((var / alt - 1.0).abs() < 1e-9, "{var} {alt}");
            assert!(two >= prev.0 && var >= prev.1);
            let sf = norm_sf(t);
            assert!(two >= sf * sf && two <= sf);
            prev = (two, var);
        }
    }

    #[test]
    fn variance_derivative_matches_difference() {
        let (n, t) = (300, 1.3);
        for &rho in &[0.05, 0.2, 0.4] {
            let h = 1e-6;
            let fd = (degree_variance(n, t, rho + h, &ctl()).unwrap()
                - degree_variance(n, t, rho - h, &ctl()).unwrap())
                / (2.0 * h);
            let d = degree_variance_drho(n, t, rho, &ctl()).unwrap();
            assert!((fd / d - 1.0).abs() < 1e-6, "{fd} {d}");
        }
    }

    #[test]
    fn nonconvergence_reports_partial() {
        let tight = SeriesControl::new(5, 1e-30).unwrap();
        let err = triangle_prob(1.0, 0.4, &tight).unwrap_err();
        let partial = err.partial().unwrap();
        assert!(partial > 0.0 && partial < 1.0);
        assert!(SeriesControl::new(0, 1e-12).is_err());
        assert!(SeriesControl::new(10, 0.0).is_err());
    }

    #[test]
    fn small_n_matches_integral_oracle() {
        // mpmath adaptive quadrature of C(n-1,k) E_z[q^k (1-q)^(n-1-k)],
        // q = 1 - Phi((t - sqrt(rho) z)/sqrt(1 - rho)), n = 4, t = 0.5, rho = 0.3.
        let oracle = [
            0.4064095860236902,
            0.3320837047359207,
            0.19099121627912743,
            0.07051549296126172,
        ];
        let d = degree_distribution(4, 0.5, 0.3, 40).unwrap();
        for (p, q) in d.probs.iter().zip(oracle) {
            assert!((p - q).abs() < 1e-8, "{p} vs {q}");
        }
    }

    #[test]
    fn distribution_normalisation_and_moments() {
        let n = 1000;
        let t = threshold_for_mean_degree(n, 10.0).unwrap();
        let d40 = degree_distribution(n, t, 0.25, 40).unwrap();
        assert!(d40.residual < 1e-6, "{}", d40.residual);
        assert!((d40.mean() / mean_degree(n, t) - 1.0).abs() < 1e-5);
        let var = degree_variance(n, t, 0.25, &ctl()).unwrap();
        assert!((d40.variance() / var - 1.0).abs() < 1e-4);
        let d30 = degree_distribution(n, t, 0.25, 30).unwrap();
        let d60 = degree_distribution(n, t, 0.25, 60).unwrap();
        let worst = d30
            .probs
            .iter()
            .zip(&d60.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
        assert!(d40.probs.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn tiny_rho_is_binomial() {
        let d = degree_distribution(30, 1.0, 1e-12, 40).unwrap();
        assert_eq!(d.method, DegreeMethod::Binomial);
        let b = binomial_pmf(29, norm_sf(1.0));
        for (x, y) in d.probs.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn laplace_symmetry_point() {
        let (n, t, rho) = (1001, 0.8, 0.3);
        let d = degree_distribution_laplace(n, t, rho).unwrap();
        let expect = ((1.0 - rho) / rho).sqrt() / 1000.0 * (-t * t / (2.0 * rho)).exp();
        assert!((d.probs[500] / expect - 1.0).abs() < 1e-12);
        assert_eq!(d.probs[0], 0.0);
        assert_eq!(d.probs[1000], 0.0);
    }

    #[test]
    fn csv_layout() {
        let d = DegreeDistribution::new(2, vec![0.25, 0.75], DegreeMethod::Binomial);
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,p_k\n0,2.5e-1\n1,7.5e-1\n");
    }
}
