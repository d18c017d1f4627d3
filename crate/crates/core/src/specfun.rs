//! Scalar special functions: the standard normal density, distribution and
//! inverse, probabilists' Hermite polynomials (with the `H_{-1}` Mills-ratio
//! extension) and Gauss-Hermite quadrature for the weight `exp(-x^2/2)`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// `sqrt(2 pi)`, the total mass of `exp(-x^2/2)`.
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Above this argument the Mills ratio is taken from its continued fraction.
const MILLS_CF_SWITCH: f64 = 6.0;

/// Standard normal density.
#[inline]
pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Standard normal distribution function `Phi(x)`.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Phi(x)`, computed without cancellation.
#[inline]
pub fn norm_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Mills ratio `(1 - Phi(x)) / phi(x)`, i.e. `H_{-1}(x)`.
pub fn mills_ratio(x: f64) -> f64 {
    if x > MILLS_CF_SWITCH {
        mills_ratio_cf(x)
    } else {
        norm_sf(x) / phi(x)
    }
}

/// Continued fraction `1/(x + 1/(x + 2/(x + 3/(x + ...))))`, modified Lentz.
fn mills_ratio_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// `ln Phi(x)`, accurate deep into the lower tail.
pub fn log_norm_cdf(x: f64) -> f64 {
    if x < -MILLS_CF_SWITCH {
        -0.5 * x * x - LN_SQRT_2PI + mills_ratio_cf(-x).ln()
    } else if x > 0.0 {
        (-norm_sf(x)).ln_1p()
    } else {
        norm_cdf(x).ln()
    }
}

/// `ln(1 - Phi(x))`.
#[inline]
pub fn log_norm_sf(x: f64) -> f64 {
    log_norm_cdf(-x)
}

/// Hazard `phi(x) / (1 - Phi(x))`.
#[inline]
pub fn norm_hazard(x: f64) -> f64 {
    1.0 / mills_ratio(x)
}

fn check_probability(x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "probability",
            value: x,
        })
    }
}

/// Closed-form rational approximation of `Phi^{-1}` (absolute error below
/// `3e-3`).
pub fn norm_cdf_inv_approx(x: f64) -> Result<f64> {
    check_probability(x)?;
    Ok(if x <= 0.5 {
        lower_tail_approx(x)
    } else {
        -lower_tail_approx(1.0 - x)
    })
}

fn lower_tail_approx(x: f64) -> f64 {
    const A0: f64 = 2.30753;
    const A1: f64 = 0.27061;
    const B1: f64 = 0.99229;
    const B2: f64 = 0.04481;
    let s = (-2.0 * x.ln()).sqrt();
    (A0 + A1 * s) / (1.0 + B1 * s + B2 * s * s) - s
}

/// `Phi^{-1}(x)` to full double precision: the rational approximation
/// polished by Halley steps on the lower tail.
pub fn norm_cdf_inv(x: f64) -> Result<f64> {
    check_probability(x)?;
    // 1 - x is exact for x >= 0.5
    let (q, sign) = if x <= 0.5 { (x, 1.0) } else { (1.0 - x, -1.0) };
    Ok(sign * lower_tail_inv(q))
}

fn lower_tail_inv(q: f64) -> f64 {
    let mut r = lower_tail_approx(q);
    for _ in 0..60 {
        let density = phi(r);
        if density == 0.0 {
            break;
        }
        let u = (norm_cdf(r) - q) / density;
        let step = u / (1.0 + 0.5 * r * u);
        r -= step;
        if step.abs() <= 1e-16 * r.abs().max(1.0) {
            break;
        }
    }
    r
}

/// Probabilists' Hermite polynomial `H_order(x)` by the three-term
/// recurrence; `order = -1` gives the Mills ratio `(1 - Phi(x)) / phi(x)`.
pub fn hermite(order: i32, x: f64) -> Result<f64> {
    match order {
        o if o < -1 => Err(invalid_order(o)),
        -1 => Ok(mills_ratio(x)),
        0 => Ok(1.0),
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for k in 1..order {
                let next = x * cur - k as f64 * prev;
                prev = cur;
                cur = next;
            }
            Ok(cur)
        }
    }
}

fn invalid_order(order: i32) -> Error {
    Error::InvalidParameter(format!("Hermite order must be >= -1, got {order}"))
}

/// `[H_{-1}(x), H_0(x), ..., H_{max_order}(x)]`.
pub fn hermite_row(max_order: usize, x: f64) -> Vec<f64> {
    let mut row = Vec::with_capacity(max_order + 2);
    row.push(mills_ratio(x));
    row.push(1.0);
    if max_order >= 1 {
        row.push(x);
    }
    for k in 1..max_order {
        let next = x * row[k + 1] - k as f64 * row[k];
        row.push(next);
    }
    row
}

/// Normalised polynomials `H_k(x) / sqrt(k!)` for `k = 0..=max_order`.
///
/// These stay in floating-point range for orders where `H_k` itself or its
/// square would overflow, and satisfy
/// `h_{k+1} = (x h_k - sqrt(k) h_{k-1}) / sqrt(k+1)`.
pub fn hermite_normalized_row(max_order: usize, x: f64) -> Vec<f64> {
    let mut row = Vec::with_capacity(max_order + 1);
    row.push(1.0);
    if max_order >= 1 {
        row.push(x);
    }
    for k in 1..max_order {
        let kf = k as f64;
        let next = (x * row[k] - kf.sqrt() * row[k - 1]) / (kf + 1.0).sqrt();
        row.push(next);
    }
    row
}

/// `(h_{order}(x), h_{order-1}(x))` with `h_k = H_k / sqrt(k!)`.
fn normalized_pair(order: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..order {
        let kf = k as f64;
        let next = (x * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Gauss-Hermite rule for `integral f(x) exp(-x^2/2) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Roots of `H_N`, strictly increasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_i w_i f(x_i)`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Expectation of `f(Z)` for standard normal `Z`.
    pub fn expect(&self, f: impl FnMut(f64) -> f64) -> f64 {
        self.integrate(f) / SQRT_2PI
    }
}

pub const MAX_QUADRATURE_ORDER: usize = 200;

/// Gauss-Hermite rule of the given order (1..=200).
///
/// The nodes are the eigenvalues of the Jacobi matrix of the probabilists'
/// Hermite recurrence (zero diagonal, off-diagonal `sqrt(k)`). Each positive
/// node is isolated by Sturm-sequence bisection and then polished with
/// Newton steps on the normalised recurrence; the negative half follows by
/// symmetry. Weights use `w_i = N! sqrt(2 pi) / (N^2 H_{N-1}(x_i)^2)`,
/// evaluated as `sqrt(2 pi) / (N h_{N-1}(x_i)^2)` so no factorial is formed.
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_QUADRATURE_ORDER {
        return Err(Error::InvalidParameter(format!(
            "quadrature order must be in 1..={MAX_QUADRATURE_ORDER}, got {order}"
        )));
    }
    let n = order;
    let nf = n as f64;
    // Gershgorin bound on the spectrum
    let bound = 2.0 * nf.sqrt() + 1.0;
    let mut nodes = vec![0.0; n];
    let mut hi = bound;
    for rank in 0..n / 2 {
        // the (rank+1)-th largest root: exactly n-1-rank eigenvalues lie below it
        let target = n - 1 - rank;
        let mut lo = 0.0;
        let mut up = hi;
        while up - lo > 1e-13 * up.max(1.0) {
            let mid = 0.5 * (lo + up);
            if eigenvalues_below(n, mid) > target {
                up = mid;
            } else {
                lo = mid;
            }
        }
        let mut x = 0.5 * (lo + up);
        for _ in 0..3 {
            let (h_n, h_nm1) = normalized_pair(n, x);
            let next = x - h_n / (nf.sqrt() * h_nm1);
            if !(lo..=up).contains(&next) {
                break;
            }
            x = next;
        }
        nodes[n - 1 - rank] = x;
        nodes[rank] = -x;
        hi = lo;
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let (_, h_nm1) = normalized_pair(n, x);
            SQRT_2PI / (nf * h_nm1 * h_nm1)
        })
        .collect();
    Ok(QuadratureRule { nodes, weights })
}

/// Number of eigenvalues of the order-`n` Hermite Jacobi matrix below `x`
/// (Sturm count via the LDL^T pivots).
fn eigenvalues_below(n: usize, x: f64) -> usize {
    let mut count = 0;
    let mut d = -x;
    if d < 0.0 {
        count += 1;
    }
    for k in 1..n {
        if d == 0.0 {
            d = f64::EPSILON;
        }
        d = -x - k as f64 / d;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// `ln k!` by log-gamma.
#[inline]
pub fn ln_factorial(k: usize) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

/// `ln C(n, k)`.
#[inline]
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}
