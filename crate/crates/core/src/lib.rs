//! Thresholded correlated-Gaussian network ensemble.
//!
//! Networks are produced by thresholding zero-mean, unit-variance Gaussian
//! relational data `X_ij` whose covariance is `rho` for pairs sharing a node
//! and zero otherwise. The crate provides:
//!
//! * [`specfun`]: normal distribution functions, probabilists' Hermite
//!   polynomials and Gauss-Hermite rules,
//! * [`ensemble`]: model parameters, the latent-variable graph sampler and the
//!   weight-matrix sampler,
//! * [`analytic`]: edge density, orthant probabilities by Hermite series,
//!   clustering, degree variance and the full degree distribution,
//! * [`graphalg`]: components, shortest paths, clustering and degree statistics,
//! * [`fitting`]: moment fitting of `(t, rho)` to an observed degree sequence,
//! * [`disparity`]: the disparity filter applied to `exp(X_ij)`,
//! * [`experiments`]: reproducible, parallel ensemble drivers and figure tables.

pub mod analytic;
pub mod disparity;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod fitting;
pub mod graph;
pub mod graphalg;
pub mod rng;
pub mod specfun;
pub mod stats;

pub use analytic::{AnalyticSummary, DegreeDistribution, DegreeMethod, SeriesControl};
pub use ensemble::{LatentVector, ModelParams, SamplerKind, WeightMatrix};
pub use error::{Error, Result};
pub use experiments::{SweepRecord, TransitionPoint};
pub use fitting::{FitFlag, FitResult};
pub use graph::Graph;
pub use graphalg::{ComponentSummary, PathStats, SourceSelection};
pub use specfun::QuadratureRule;
