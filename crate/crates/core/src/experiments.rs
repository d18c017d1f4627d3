//! Reproducible ensemble experiments.
//!
//! Each run draws its graphs from seeds derived from `(master seed, grid
//! index, sample index)`. Samples are evaluated on a dedicated worker pool,
//! collected in index order and reduced sequentially, so every output is
//! independent of the number of workers.
//!
//! CSV outputs start with a block of `# key=value` lines recording the run
//! parameters. Missing values are empty cells.

use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    degree_distribution, degree_distribution_laplace, degree_variance, summarize_lenient,
    threshold_for_mean_degree, SeriesControl, DEFAULT_QUADRATURE_ORDER,
};
use crate::disparity::{sample_filtered_graph, solve_alpha, DisparityParams};
use crate::ensemble::{sample_graph_with, ModelParams, SamplerKind};
use crate::error::{Error, Result};
use crate::fitting::{fit, read_degree_sequence};
use crate::graph::{read_edge_list, Graph};
use crate::graphalg::{
    average_neighbor_degree, components, degree_histogram, local_clustering, mean_shortest_path,
    SourceSelection,
};
use crate::rng::derive_seed;
use crate::stats::mean_stderr;

/// Execution settings shared by all drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
    pub sampler: SamplerKind,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: None,
            sampler: SamplerKind::Skip,
        }
    }
}

impl RunOptions {
    fn install<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = self.workers {
            if w == 0 {
                return Err(Error::InvalidParameter("workers must be positive".into()));
            }
            builder = builder.num_threads(w);
        }
        Ok(builder.build()?.install(job))
    }
}

/// One aggregated grid point of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub rho: f64,
    pub mean_degree_target: f64,
    pub statistic: String,
    /// Mean over the samples with a defined value; `None` if there were none.
    pub value: Option<f64>,
    /// Standard error of `value`; 0 for a single sample.
    pub stderr: Option<f64>,
    pub samples: usize,
    pub master_seed: u64,
}

/// Location of the susceptibility peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionPoint {
    pub n: usize,
    pub rho: f64,
    pub k_critical: f64,
    pub k_grid_step: f64,
    pub peak_value: f64,
}

pub const SECOND_LARGEST: &str = "second_largest_component";
pub const MEAN_SHORTEST_PATH: &str = "mean_shortest_path";

/// Evaluates `stat` on `samples` graphs per grid point and aggregates.
fn run_grid(
    grid: &[(usize, f64, f64)],
    samples: usize,
    master_seed: u64,
    opts: &RunOptions,
    statistic: &str,
    stat: impl Fn(&Graph, u64) -> Option<f64> + Sync,
) -> Result<Vec<SweepRecord>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let params = grid
        .iter()
        .map(|&(n, rho, k)| ModelParams::with_mean_degree(n, k, rho))
        .collect::<Result<Vec<_>>>()?;
    let jobs = grid.len() * samples;
    let values: Vec<Option<f64>> = opts.install(|| {
        (0..jobs)
            .into_par_iter()
            .map(|job| {
                let (g, s) = (job / samples, job % samples);
                let seed = derive_seed(master_seed, g as u64, s as u64);
                let graph = sample_graph_with(&params[g], seed, opts.sampler);
                stat(&graph, seed)
            })
            .collect()
    })?;
    Ok(grid
        .iter()
        .zip(values.chunks(samples))
        .map(|(&(n, rho, k), chunk)| {
            let defined: Vec<f64> = chunk.iter().flatten().copied().collect();
            let agg = mean_stderr(&defined);
            SweepRecord {
                n,
                rho,
                mean_degree_target: k,
                statistic: statistic.to_string(),
                value: agg.map(|a| a.0),
                stderr: agg.map(|a| a.1),
                samples,
                master_seed,
            }
        })
        .collect())
}

fn check_sweep_rho(rho: f64) -> Result<()> {
    if (0.0..0.5).contains(&rho) {
        Ok(())
    } else {
        Err(Error::Domain { what: "rho", value: rho })
    }
}

/// Mean second-largest component size over a grid of mean degrees.
pub fn run_susceptibility_sweep(
    n: usize,
    rho: f64,
    k_grid: &[f64],
    samples: usize,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<Vec<SweepRecord>> {
    check_sweep_rho(rho)?;
    let grid: Vec<_> = k_grid.iter().map(|&k| (n, rho, k)).collect();
    run_grid(&grid, samples, master_seed, opts, SECOND_LARGEST, |g, _| {
        Some(components(g).second_largest as f64)
    })
}

/// Grid argmax of the susceptibility; ties resolve to the smaller mean degree.
pub fn find_transition(records: &[SweepRecord]) -> Result<TransitionPoint> {
    if records.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 grid points, got {}",
            records.len()
        )));
    }
    let (n, rho) = (records[0].n, records[0].rho);
    if records.iter().any(|r| r.n != n || r.rho != rho) {
        return Err(Error::InvalidParameter("records mix different (n, rho)".into()));
    }
    let mut points: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.mean_degree_target, r.value.unwrap_or(f64::NEG_INFINITY)))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let first = points[0].1;
    if points.iter().all(|p| p.1 == first) {
        return Err(Error::NoTransition);
    }
    let mut best = points[0];
    for &p in &points[1..] {
        if p.1 > best.1 {
            best = p;
        }
    }
    let step = points
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .fold(f64::INFINITY, f64::min);
    let step = (step * 1e9).round() / 1e9;
    Ok(TransitionPoint {
        n,
        rho,
        k_critical: best.0,
        k_grid_step: step,
        peak_value: best.1,
    })
}

/// Mean shortest-path length on the largest component over `(rho, n)` grids.
/// Records are ordered by `rho`, then `n`.
pub fn run_path_scaling(
    n_grid: &[usize],
    rho_grid: &[f64],
    mean_degree: f64,
    samples: usize,
    master_seed: u64,
    opts: &RunOptions,
) -> Result<Vec<SweepRecord>> {
    let mut grid = Vec::new();
    for &rho in rho_grid {
        check_sweep_rho(rho)?;
        for &n in n_grid {
            grid.push((n, rho, mean_degree));
        }
    }
    run_grid(&grid, samples, master_seed, opts, MEAN_SHORTEST_PATH, |g, seed| {
        mean_shortest_path(g, SourceSelection::Auto { seed: !seed })
            .ok()
            .map(|p| p.mean_distance)
    })
}

/// Writes `# key=value` provenance lines.
pub fn write_header(out: &mut dyn Write, fields: &[(&str, String)]) -> std::io::Result<()> {
    for (k, v) in fields {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn list<T: Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// Writes sweep records as CSV.
pub fn write_records_csv(records: &[SweepRecord], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "n,rho,mean_degree_target,statistic,value,stderr,samples,master_seed")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.rho,
            r.mean_degree_target,
            r.statistic,
            cell(r.value),
            cell(r.stderr),
            r.samples,
            r.master_seed
        )?;
    }
    Ok(())
}

/// Inputs of [`run_figure_table`]. Unset fields take per-figure defaults.
#[derive(Debug, Clone, Default)]
pub struct FigureParams {
    pub n: Option<usize>,
    pub mean_degree: Option<f64>,
    pub rho_grid: Option<Vec<f64>>,
    pub n_grid: Option<Vec<usize>>,
    pub k_grid: Option<Vec<f64>>,
    pub order: Option<usize>,
    pub samples: Option<usize>,
    pub seed: u64,
    /// Observed network for `fig7` and `fig8`.
    pub edges: Option<PathBuf>,
    pub series: SeriesControl,
    pub run: RunOptions,
}

pub const FIGURES: [&str; 8] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"];

fn steps(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start + step * i as f64).collect()
}

/// Rounds away floating-point noise from generated grids.
fn tidy(xs: Vec<f64>) -> Vec<f64> {
    xs.into_iter().map(|x| (x * 1e9).round() / 1e9).collect()
}

/// Writes the table behind one figure and returns numerical warnings.
///
/// | id   | columns |
/// |------|---------|
/// | fig2 | `panel,n,mean_degree,rho,clustering,triangles_per_node` |
/// | fig3 | `n,mean_degree,rho,degree_variance` |
/// | fig4 | `rho,k,p_quadrature,p_laplace` |
/// | fig5 | sweep records of the second-largest component size |
/// | fig6 | sweep records of the mean shortest-path length |
/// | fig7 | `k,observed,model` |
/// | fig8 | `k,nodes,observed_clustering,model_clustering,observed_knn,model_knn` |
/// | fig9 | `rho,alpha,k,frequency` |
pub fn run_figure_table(id: &str, p: &FigureParams, out: &mut dyn Write) -> Result<Vec<String>> {
    match id {
        "fig2" => fig2(p, out),
        "fig3" => fig3(p, out),
        "fig4" => fig4(p, out),
        "fig5" => fig5(p, out),
        "fig6" => fig6(p, out),
        "fig7" => fig7(p, out),
        "fig8" => fig8(p, out),
        "fig9" => fig9(p, out),
        other => Err(Error::UnknownFigure(other.to_string())),
    }
}

fn note(warnings: &mut Vec<String>, context: String, errs: Vec<(&'static str, Error)>) {
    for (field, e) in errs {
        warnings.push(format!("{context}: {field}: {e}"));
    }
}

fn fig2(p: &FigureParams, out: &mut dyn Write) -> Result<Vec<String>> {
    let n = p.n.unwrap_or(100_000);
    let k = p.mean_degree.unwrap_or(4.0);
    let rhos = p.rho_grid.clone().unwrap_or_else(|| tidy(steps(0.0, 0.05, 10)));
    let ns = p
        .n_grid
        .clone()
        .unwrap_or_else(|| vec![1_000, 2_000, 5_000, 10_000, 20_000, 50_000, 100_000]);
    let ks = p.k_grid.clone().unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0]);
    write_header(
        out,
        &[
            ("figure", "fig2".into()),
            ("n", n.to_string()),
            ("mean_degree", k.to_string()),
            ("rho_grid", list(&rhos)),
            ("n_grid", list(&ns)),
            ("k_grid", list(&ks)),
            ("max_terms", p.series.max_terms.to_string()),
            ("abs_tol", p.series.abs_tol.to_string()),
        ],
    )?;
    writeln!(out, "panel,n,mean_degree,rho,clustering,triangles_per_node")?;
    let mut warnings = Vec::new();
    let mut row = |panel: &str, n: usize, k: f64, rho: f64| -> Result<()> {
        let t = threshold_for_mean_degree(n, k)?;
        let (s, errs) = summarize_lenient(n, t, rho, &p.series)?;
        note(&mut warnings, format!("n={n} k={k} rho={rho}"), errs);
        writeln!(out, "{panel},{n},{k},{rho},{},{}", s.clustering, s.triangles_per_node)?;
        Ok(())
    };
    for &rho in &rhos {
        row("rho", n, k, rho)?;
    }
    for &rho in &rhos {
        for &m in &ns {
            row("n", m, k, rho)?;
        }
    }
    for &rho in &rhos {
        for &kk in &ks {
            row("k", n, kk, rho)?;
        }
    }
    Ok(warnings)
}

fn fig3(p: &FigureParams, out: &mut dyn Write) -> Result<Vec<String>> {
    let n = p.n.unwrap_or(100_000);
    let rhos = p.rho_grid.clone().unwrap_or_else(|| tidy(steps(0.0, 0.025, 21)));
    let ks = p.k_grid.clone().unwrap_or_else(|| vec![2.0, 4.0, 8.0, 16.0, 32.0]);
    write_header(
        out,
        &[
            ("figure", "fig3".into()),
            ("n", n.to_string()),
            ("rho_grid", list(&rhos)),
            ("k_grid", list(&ks)),
            ("max_terms", p.series.max_terms.to_string()),
            ("abs_tol", p.series.abs_tol.to_string()),
        ],
    )?;
    writeln!(out, "n,mean_degree,rho,degree_variance")?;
    let mut warnings = Vec::new();
    for &k in &ks {
        let t = threshold_for_mean_degree(n, k)?;
        for &rho in &rhos {
            let v = match degree_variance(n, t, rho, &p.series) {
                Ok(v) => v,
                Err(e) => match e.partial() {
                    Some(v) => {
                        warnings.push(format!("k={k} rho={rho}: {e}"));
                        v
                    }
                    None => return Err(e),
                },
            };
            writeln!(out, "{n},{k},{rho},{v}")?;
        }
    }
    Ok(warnings)
}

fn fig4(p: &FigureParams, out: &mut dyn Write) -> Result<Vec<String>> {
    let n = p.n.unwrap_or(100_000);
    let k = p.mean_degree.unwrap_or(100.0);
    let order = p.order.unwrap_or(60);
    let rhos = p
        .rho_grid
        .clone()
        .unwrap_or_else(|| vec![0.05, 0.1, 0.2, 0.3, 0.4, 0.45]);
    let t = threshold_for_mean_degree(n, k)?;
    write_header(
        out,
        &[
            ("figure", "fig4".into()),
            ("n", n.to_string()),
            ("mean_degree", k.to_string()),
            ("t", t.to_string()),
            ("order", order.to_string()),
            ("rho_grid", list(&rhos)),
        ],
    )?;
    writeln!(out, "rho,k,p_quadrature,p_laplace")?;
    let mut warnings = Vec::new();
    for &rho in &rhos {
        let quad = degree_distribution(n, t, rho, order)?;
        if quad.residual > 1e-6 {
            warnings.push(format!("rho={rho}: quadrature residual {:e}", quad.residual));
        }
        let lap = if rho > 0.0 {
            Some(degree_distribution_laplace(n, t, rho)?.probs)
        } else {
            None
        };
        for (kk, q) in quad.probs.iter().enumerate() {
            let l = lap.as_ref().map(|l| l[kk]);
            writeln!(out, "{rho},{kk},{q},{}", cell(l))?;
        }
    }
    Ok(warnings)
}

fn fig5(p: &FigureParams, out: &mut dyn Write) -> Result<Vec<String>> {
    let ns = p.n_grid.clone().unwrap_or_else(|| vec![1_000, 10_000]);
    let rhos = p.rho_grid.clone().unwrap_or_else(|| vec![0.0, 0.15, 0.3, 0.45]);
    let ks = p.k_grid.clone().unwrap_or_else(|| tidy(steps(0.1, 0.05, 59)));
    let samples = p.samples.unwrap_or(1000);
    write_header(
        out,
        &[
            ("figure", "fig5".into()),
            ("n_grid", list(&ns)),
            ("rho_grid", list(&rhos)),
            ("k_grid", list(&ks)),
            ("samples", samples.to_string()),
            ("seed", p.seed.to_string()),
            ("sampler", format!("{:?}", p.run.sampler).to_lowercase()),
        ],
    )?;
    let mut all = Vec::new();
    let mut transitions = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        for (j, &rho) in rhos.iter().enumerate() {
            let seed = derive_seed(p.seed, i as u64, j as u64);
            let recs = run_susceptibility_sweep(n, rho, &ks, samples, seed, &p.run)?;
            transitions.push(find_transition(&recs));
            all.extend(recs);
        }
    }
    write_records_csv(&all, out)?;
    let mut warnings = Vec::new();
    for tr in transitions {
        match tr {
            Ok(tp) => writeln!(
                out,
                "# transition n={} rho={} k_critical={}",
                tp.n, tp.rho, tp.k_critical
            )?,
            Err(e) => warnings.push(e.to_string()),
        }
    }
    Ok(warnings)
}

fn fig6(p: &FigureParams, out: &mut dyn Write) -> Result<Vec<String>> {
    let ns = p
        .n_grid
        .clone()
        .unwrap_or_else(|| vec![100, 200, 400, 800, 1_600, 3_200, 6_400, 12_800, 25_600]);
    let rhos = p.rho_grid.clone().unwrap_or_else(|| vec![0.0, 0.1, 0.2, 0.3, 0.4]);
    let k = p.mean_degree.unwrap_or(5.0);
    let samples = p.samples.unwrap_or(200);
    write_header(
        out,
        &[
            ("figure", "fig6".into()),
            ("n_grid", list(&ns)),
            ("rho_grid", list(&rhos)),
            ("mean_degree", k.to_string()),
            ("samples", samples.to_string()),
            ("seed", p.seed.to_string()),
            ("sampler", format!("{:?}", p.run.sampler).to_lowercase()),
        ],
    )?;
    let recs = run_path_scaling(&ns, &rhos, k, samples, p.seed, &p.run)?;
    write_records_csv(&recs, out)?;
    Ok(recs
        .iter()
        .filter(|r| r.value.is_none())
        .map(|r| format!("n={} rho={}: no giant component in any sample", r.n, r.rho))
        .collect())
}

fn observed_graph(p: &FigureParams, id: &str) -> Result<(PathBuf, Graph, usize)> {
    let path = p
        .edges
        .clone()
        .ok_or_else(|| Error::InvalidParameter(format!("{id} needs an observed edge list")))?;
    let file = std::fs::File::open(&path)?;
    let list = read_edge_list(std::io::BufReader::new(file))?;
    Ok((path, list.graph, list.duplicates))
}

fn fit_warnings(fit: &crate::fitting::FitResult, duplicates: usize) -> Vec<String> {
    let mut w = Vec::new();
    if duplicates > 0 {
        w.push(format!("{duplicates} duplicate edge(s) ignored"));
    }
    if let Some(flag) = fit.flag {
        w.push(format!("fit clamped rho to {} ({flag:?})", fit.rho));
    }
    w
}

fn fig7(p: &FigureParams, out: &mut dyn Write) -> Result<Vec<String>> {
    let (path, _, _) = observed_graph(p, "fig7")?;
    let seq = read_degree_sequence(&path)?;
    let result = fit(&seq.degrees, seq.n)?;
    let order = p.order.unwrap_or(DEFAULT_QUADRATURE_ORDER);
    let model = degree_distribution(seq.n, result.t, result.rho, order)?;
    write_header(
        out,
        &[
            ("figure", "fig7".into()),
            ("edges", path.display().to_string()),
            ("n", seq.n.to_string()),
            ("t", result.t.to_string()),
            ("rho", result.rho.to_string()),
            ("order", order.to_string()),
        ],
    )?;
    writeln!(out, "k,observed,model")?;
    let mut counts = vec![0usize; seq.n];
    for &d in &seq.degrees {
        counts[d] += 1;
    }
    for (k, (&c, &m)) in counts.iter().zip(&model.probs).enumerate() {
        writeln!(out, "{k},{},{m}", c as f64 / seq.n as f64)?;
    }
    Ok(fit_warnings(&result, seq.duplicates))
}

/// Per-degree sums and counts of a node statistic.
fn by_degree(acc: &mut [(f64, f64, usize)], g: &Graph) {
    let cc = local_clustering(g);
    let knn = average_neighbor_degree(g);
    for v in 0..g.n() {
        let e = &mut acc[g.degree(v)];
        e.0 += cc[v];
        e.1 += knn[v];
        e.2 += 1;
    }
}

fn fig8(p: &FigureParams, out: &mut dyn Write) -> Result<Vec<String>> {
    let (path, observed, duplicates) = observed_graph(p, "fig8")?;
    let n = observed.n();
    let result = fit(&observed.degrees(), n)?;
    let samples = p.samples.unwrap_or(20);
    let params = ModelParams::new(n, result.t, result.rho)?;
    let sampled: Vec<Graph> = p.run.install(|| {
        (0..samples)
            .into_par_iter()
            .map(|s| sample_graph_with(&params, derive_seed(p.seed, 0, s as u64), p.run.sampler))
            .collect()
    })?;
    let mut obs = vec![(0.0, 0.0, 0usize); n];
    by_degree(&mut obs, &observed);
    let mut sim = vec![(0.0, 0.0, 0usize); n];
    for g in &sampled {
        by_degree(&mut sim, g);
    }
    write_header(
        out,
        &[
            ("figure", "fig8".into()),
            ("edges", path.display().to_string()),
            ("n", n.to_string()),
            ("t", result.t.to_string()),
            ("rho", result.rho.to_string()),
            ("samples", samples.to_string()),
            ("seed", p.seed.to_string()),
        ],
    )?;
    writeln!(
        out,
        "k,nodes,observed_clustering,model_clustering,observed_knn,model_knn"
    )?;
    let mean = |e: (f64, f64, usize)| {
        if e.2 == 0 {
            (None, None)
        } else {
            (Some(e.0 / e.2 as f64), Some(e.1 / e.2 as f64))
        }
    };
    let max_k = obs
        .iter()
        .zip(&sim)
        .rposition(|(a, b)| a.2 + b.2 > 0)
        .unwrap_or(0);
    for k in 0..=max_k {
        let (oc, ok) = mean(obs[k]);
        let (mc, mk) = mean(sim[k]);
        writeln!(
            out,
            "{k},{},{},{},{},{}",
            obs[k].2,
            cell(oc),
            cell(mc),
            cell(ok),
            cell(mk)
        )?;
    }
    Ok(fit_warnings(&result, duplicates))
}

/// Pooled degree counts of `samples` filtered graphs drawn at grid index `grid`.
pub fn pooled_disparity_degrees(
    dp: &DisparityParams,
    samples: usize,
    master_seed: u64,
    grid: u64,
    opts: &RunOptions,
) -> Result<Vec<u64>> {
    let hists = opts.install(|| {
        (0..samples)
            .into_par_iter()
            .map(|s| {
                sample_filtered_graph(dp, derive_seed(master_seed, grid, s as u64))
                    .map(|g| degree_histogram(&g))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut pooled = vec![0u64; dp.n()];
    for h in &hists {
        for (d, c) in h.iter().enumerate() {
            pooled[d] += c;
        }
    }
    Ok(pooled)
}

fn fig9(p: &FigureParams, out: &mut dyn Write) -> Result<Vec<String>> {
    let n = p.n.unwrap_or(2_000);
    let k = p.mean_degree.unwrap_or(4.0);
    let rhos = p.rho_grid.clone().unwrap_or_else(|| vec![0.1, 0.3, 0.45]);
    let order = p.order.unwrap_or(DEFAULT_QUADRATURE_ORDER);
    let samples = p.samples.unwrap_or(100);
    write_header(
        out,
        &[
            ("figure", "fig9".into()),
            ("n", n.to_string()),
            ("mean_degree", k.to_string()),
            ("rho_grid", list(&rhos)),
            ("order", order.to_string()),
            ("samples", samples.to_string()),
            ("seed", p.seed.to_string()),
        ],
    )?;
    writeln!(out, "rho,alpha,k,frequency")?;
    for (i, &rho) in rhos.iter().enumerate() {
        let alpha = solve_alpha(n, rho, k, order)?;
        let dp = DisparityParams::new(n, rho, alpha)?;
        let pooled = pooled_disparity_degrees(&dp, samples, p.seed, i as u64, &p.run)?;
        let total = (n * samples) as f64;
        let last = pooled.iter().rposition(|&c| c > 0).unwrap_or(0);
        for (d, &c) in pooled[..=last].iter().enumerate() {
            writeln!(out, "{rho},{alpha},{d},{}", c as f64 / total)?;
        }
    }
    Ok(Vec::new())
}
