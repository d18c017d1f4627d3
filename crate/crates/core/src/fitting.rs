//! Moment fitting of `(t, rho)` to an observed degree sequence.
//!
//! The threshold is fixed by the mean degree. `rho` is then chosen so that the
//! model degree variance equals the observed population variance. The model
//! variance is strictly increasing in `rho`, so the root is unique when it
//! exists; otherwise `rho` is clamped to the nearest end of `[0, 1/2]` and the
//! result is flagged.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytic::{degree_variance, degree_variance_drho, threshold_for_mean_degree, SeriesControl};
use crate::error::{Error, Result};
use crate::graph::read_edge_list;
use crate::stats::population_moments;

pub const RELATIVE_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFlag {
    /// Observed variance is below the binomial floor; `rho` clamped to 0.
    SubBinomialVariance,
    /// Observed variance exceeds the model variance at `rho = 1/2`.
    ExcessVariance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub n: usize,
    pub t: f64,
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
    pub target_mean: f64,
    pub target_variance: f64,
    pub model_variance_at_fit: f64,
    pub flag: Option<FitFlag>,
}

/// Root-finding strategy for `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootMethod {
    /// Newton steps with the analytic derivative, bisecting whenever a step
    /// leaves the current bracket.
    #[default]
    Newton,
    Bisection,
}

fn variance_or_partial(n: usize, t: f64, rho: f64, ctl: &SeriesControl) -> Result<f64> {
    degree_variance(n, t, rho, ctl).or_else(|e| e.partial().ok_or(e))
}

fn slope_or_partial(n: usize, t: f64, rho: f64, ctl: &SeriesControl) -> Result<f64> {
    degree_variance_drho(n, t, rho, ctl).or_else(|e| e.partial().ok_or(e))
}

/// Fits `(t, rho)` to a degree sequence of length `n`.
pub fn fit(degrees: &[usize], n: usize) -> Result<FitResult> {
    if degrees.len() != n {
        return Err(Error::InvalidParameter(format!(
            "degree sequence has length {}, expected n = {n}",
            degrees.len()
        )));
    }
    let values: Vec<f64> = degrees.iter().map(|&d| d as f64).collect();
    let (mean, variance) = population_moments(&values);
    fit_moments(n, mean, variance, &SeriesControl::default(), RootMethod::Newton)
}

/// Fits `(t, rho)` to a target mean degree and degree variance.
pub fn fit_moments(
    n: usize,
    mean: f64,
    variance: f64,
    ctl: &SeriesControl,
    method: RootMethod,
) -> Result<FitResult> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n must be at least 3, got {n}")));
    }
    if !(variance >= 0.0) {
        return Err(Error::Domain { what: "variance", value: variance });
    }
    let t = threshold_for_mean_degree(n, mean)?;
    let result = |rho: f64, iterations, converged, model: f64, flag| FitResult {
        n,
        t,
        rho,
        iterations,
        converged,
        target_mean: mean,
        target_variance: variance,
        model_variance_at_fit: model,
        flag,
    };
    let tol = RELATIVE_TOLERANCE * variance.max(f64::MIN_POSITIVE);

    let floor = variance_or_partial(n, t, 0.0, ctl)?;
    if variance - floor <= tol {
        return Ok(if (variance - floor).abs() <= tol {
            result(0.0, 0, true, floor, None)
        } else {
            result(0.0, 0, false, floor, Some(FitFlag::SubBinomialVariance))
        });
    }
    let ceiling = variance_or_partial(n, t, 0.5, ctl)?;
    if variance - ceiling >= -tol {
        return Ok(if (variance - ceiling).abs() <= tol {
            result(0.5, 0, true, ceiling, None)
        } else {
            result(0.5, 0, false, ceiling, Some(FitFlag::ExcessVariance))
        });
    }

    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    let mut rho = 0.5 * (variance - floor) / (ceiling - floor);
    let mut model = floor;
    for iteration in 1..=MAX_ITERATIONS {
        model = variance_or_partial(n, t, rho, ctl)?;
        let residual = model - variance;
        if residual.abs() <= tol {
            return Ok(result(rho, iteration, true, model, None));
        }
        if residual < 0.0 {
            lo = rho;
        } else {
            hi = rho;
        }
        let mid = 0.5 * (lo + hi);
        let next = match method {
            RootMethod::Bisection => mid,
            RootMethod::Newton => {
                let d = slope_or_partial(n, t, rho, ctl)?;
                let step = rho - residual / d;
                if d > 0.0 && step > lo && step < hi {
                    step
                } else {
                    mid
                }
            }
        };
        if hi - lo <= 1e-15 {
            return Ok(result(next, iteration, false, model, None));
        }
        rho = next;
    }
    Ok(result(rho, MAX_ITERATIONS, false, model, None))
}

/// Degree sequence read from an edge-list file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<usize>,
    pub n: usize,
    /// Duplicate edges dropped while reading.
    pub duplicates: usize,
}

pub fn read_degree_sequence(path: impl AsRef<Path>) -> Result<DegreeSequence> {
    let file = File::open(path)?;
    let list = read_edge_list(BufReader::new(file))?;
    Ok(DegreeSequence {
        degrees: list.graph.degrees(),
        n: list.graph.n(),
        duplicates: list.duplicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::mean_degree;
    use std::io::Write;

    fn ctl() -> SeriesControl {
        SeriesControl::default()
    }

    #[test]
    fn inverts_forward_map() {
        let n = 2000;
        let t = threshold_for_mean_degree(n, 8.0).unwrap();
        let v = degree_variance(n, t, 0.35, &ctl()).unwrap();
        let fit = fit_moments(n, mean_degree(n, t), v, &ctl(), RootMethod::Newton).unwrap();
        assert!(fit.converged);
        assert!((fit.rho - 0.35).abs() < 1e-6, "{}", fit.rho);
        assert!((mean_degree(n, fit.t) / mean_degree(n, t) - 1.0).abs() < 1e-9);
        let bis = fit_moments(n, mean_degree(n, t), v, &ctl(), RootMethod::Bisection).unwrap();
        assert!((bis.rho - fit.rho).abs() < 1e-8);
        assert!(fit.iterations < bis.iterations);
    }

    #[test]
    fn binomial_floor_gives_zero() {
        let n = 500;
        let t = threshold_for_mean_degree(n, 6.0).unwrap();
        let floor = degree_variance(n, t, 0.0, &ctl()).unwrap();
        let fit = fit_moments(n, 6.0, floor, &ctl(), RootMethod::Newton).unwrap();
        assert_eq!(fit.rho, 0.0);
        assert!(fit.converged && fit.flag.is_none());
        let fit = fit_moments(n, 6.0, 0.5 * floor, &ctl(), RootMethod::Newton).unwrap();
        assert_eq!((fit.rho, fit.converged), (0.0, false));
        assert_eq!(fit.flag, Some(FitFlag::SubBinomialVariance));
    }

    #[test]
    fn excess_variance_clamps() {
        let fit = fit_moments(500, 6.0, 1e6, &ctl(), RootMethod::Newton).unwrap();
        assert_eq!((fit.rho, fit.converged), (0.5, false));
        assert_eq!(fit.flag, Some(FitFlag::ExcessVariance));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit(&[1, 1], 2).is_err());
        assert!(fit(&[0, 0, 0], 3).is_err());
        assert!(fit(&[1, 1, 1], 4).is_err());
    }

    fn degrees_of(text: &str) -> DegreeSequence {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        read_degree_sequence(f.path()).unwrap()
    }

    #[test]
    fn degree_sequence_files() {
        let d = degrees_of("0 1\n1 2");
        assert_eq!((d.degrees, d.n), (vec![1, 2, 1], 3));
        let d = degrees_of("# n=5\n0 1\n");
        assert_eq!(d.degrees, vec![1, 1, 0, 0, 0]);
        let d = degrees_of("0 1\n1 0\n");
        assert_eq!((d.degrees, d.duplicates), (vec![1, 1], 1));
    }
}
