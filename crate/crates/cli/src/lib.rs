//! Argument parsing and command dispatch for the `threshnet` binary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use threshnet::analytic::{
    degree_distribution, degree_distribution_laplace, summarize_lenient,
    threshold_for_mean_degree, DEFAULT_QUADRATURE_ORDER,
};
use threshnet::disparity::{disparity_edge_density, solve_alpha, DisparityParams};
use threshnet::ensemble::{sample_graph_with, sample_weights};
use threshnet::experiments::{
    find_transition, pooled_disparity_degrees, run_figure_table, run_path_scaling, run_susceptibility_sweep,
    write_header, write_records_csv, FigureParams, RunOptions,
};
use threshnet::fitting::{fit, read_degree_sequence};
use threshnet::graph::write_edge_list;
use threshnet::{Error, ModelParams, SamplerKind, SeriesControl};

#[derive(Debug, Parser)]
#[command(
    name = "threshnet",
    version,
    about = "Thresholded correlated-Gaussian network ensemble"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// `(n, rho)` plus exactly one of `--t` and `--mean-degree`.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Number of nodes.
    #[arg(long)]
    pub n: usize,
    /// Local correlation between edges sharing a node, in [0, 0.5].
    #[arg(long, allow_negative_numbers = true)]
    pub rho: f64,
    /// Threshold on the edge weights.
    #[arg(
        long,
        allow_negative_numbers = true,
        conflicts_with = "mean_degree",
        required_unless_present = "mean_degree"
    )]
    pub t: Option<f64>,
    /// Expected mean degree; sets t = Phi^-1(1 - k/(n-1)).
    #[arg(long)]
    pub mean_degree: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    /// Maximum number of series terms.
    #[arg(long, default_value_t = 200)]
    pub max_terms: usize,
    /// Stop once three consecutive terms are below this magnitude.
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Master seed (falls back to THRESHNET_SEED, then 0).
    #[arg(long, env = "THRESHNET_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Graph sampler.
    #[arg(long, value_enum, default_value_t = SamplerArg::Skip)]
    pub sampler: SamplerArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Naive,
    Skip,
}

impl From<SamplerArg> for SamplerKind {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::Naive => SamplerKind::Naive,
            SamplerArg::Skip => SamplerKind::Skip,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DegreeMethodArg {
    Quadrature,
    Laplace,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Draw one graph and write it as an edge list.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, env = "THRESHNET_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SamplerArg::Naive)]
        sampler: SamplerArg,
        /// Write the weight matrix rows instead of the thresholded graph.
        #[arg(long)]
        weights: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form statistics of one parameter point.
    Analytic {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree distribution by quadrature or by the Laplace asymptotic.
    DegreeDist {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = DegreeMethodArg::Quadrature)]
        method: DegreeMethodArg,
        #[arg(long, default_value_t = DEFAULT_QUADRATURE_ORDER)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit (t, rho) to the degree sequence of an edge-list file.
    Fit {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Second-largest component sweep over mean degree.
    SweepGc {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 0.1)]
        k_min: f64,
        #[arg(long, default_value_t = 3.0)]
        k_max: f64,
        #[arg(long, default_value_t = 0.05)]
        k_step: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Sweep output; the transition point goes to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean shortest-path length on the largest component.
    Paths {
        /// Comma-separated node counts.
        #[arg(long, value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
        /// Comma-separated correlations.
        #[arg(long, value_delimiter = ',', required = true)]
        rho_grid: Vec<f64>,
        #[arg(long, default_value_t = 5.0)]
        mean_degree: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the disparity-filter significance level and simulate.
    Disparity {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        mean_degree: f64,
        #[arg(long, default_value_t = DEFAULT_QUADRATURE_ORDER)]
        order: usize,
        /// Filtered samples to simulate (0 to only solve for alpha).
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[command(flatten)]
        run: RunArgs,
        /// Pooled degree histogram of the simulated samples.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the table behind a figure.
    Figure {
        /// One of fig2 ... fig9.
        #[arg(long)]
        id: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        mean_degree: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        rho_grid: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        k_grid: Option<Vec<f64>>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        /// Observed network for fig7 and fig8.
        #[arg(long)]
        edges: Option<PathBuf>,
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parsed command line with the model threshold resolved.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// Model parameters for commands that take `--n/--rho/--t|--mean-degree`.
    pub model: Option<ModelParams>,
}

fn usage_error(msg: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(ErrorKind::ValueValidation, msg)
}

fn resolve(m: &ModelArgs) -> Result<ModelParams, clap::Error> {
    let t = match (m.t, m.mean_degree) {
        (Some(t), None) => t,
        (None, Some(k)) => threshold_for_mean_degree(m.n, k).map_err(usage_error)?,
        _ => return Err(usage_error("exactly one of --t and --mean-degree is required")),
    };
    ModelParams::new(m.n, t, m.rho).map_err(usage_error)
}

/// Parses `argv` (including the program name). Usage problems, including an
/// unresolvable `--mean-degree`, are reported as clap errors.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let model = match &cli.command {
        Command::Sample { model, .. }
        | Command::Analytic { model, .. }
        | Command::DegreeDist { model, .. } => Some(resolve(model)?),
        _ => None,
    };
    Ok(RunConfig {
        command: cli.command,
        model,
    })
}

/// Output sink: a file when a path is given, otherwise standard output.
fn sink<'a>(path: &Option<PathBuf>, stdout: &'a mut dyn Write) -> io::Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            io::Error::new(e.kind(), format!("{}: {e}", p.display()))
        })?)),
        None => Box::new(stdout),
    })
}

fn write_json<T: Serialize>(value: &T, out: &mut dyn Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

fn run_options(run: &RunArgs) -> RunOptions {
    RunOptions {
        workers: run.workers,
        sampler: run.sampler.into(),
    }
}

fn series(s: &SeriesArgs) -> threshnet::Result<SeriesControl> {
    SeriesControl::new(s.max_terms, s.abs_tol)
}

fn grid(min: f64, max: f64, step: f64) -> threshnet::Result<Vec<f64>> {
    if !(step > 0.0) || !(max >= min) {
        return Err(Error::InvalidParameter(format!(
            "bad grid: min {min}, max {max}, step {step}"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((min + step * i as f64) * 1e9).round() / 1e9)
        .collect())
}

#[derive(Serialize)]
struct DisparityReport {
    n: usize,
    rho: f64,
    target_mean_degree: f64,
    alpha: f64,
    predicted_mean_degree: f64,
    samples: usize,
    realized_mean_degree: Option<f64>,
    realized_degree_variance: Option<f64>,
}

/// Executes a parsed command. Results go to `stdout` or the `--out` file;
/// numerical warnings go to `stderr`.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> threshnet::Result<()> {
    let model = config.model;
    match &config.command {
        Command::Sample {
            seed,
            sampler,
            weights,
            out,
            ..
        } => {
            let params = model.expect("resolved model");
            let mut w = sink(out, stdout)?;
            if *weights {
                let m = sample_weights(&params, *seed);
                writeln!(w, "# n={}", m.n())?;
                for i in 0..m.n() {
                    for j in i + 1..m.n() {
                        writeln!(w, "{i} {j} {}", m.value(i, j))?;
                    }
                }
            } else {
                let g = sample_graph_with(&params, *seed, (*sampler).into());
                write_edge_list(&g, &mut w)?;
            }
            w.flush()?;
        }
        Command::Analytic {
            series: s,
            format,
            out,
            ..
        } => {
            let p = model.expect("resolved model");
            let (summary, notes) = summarize_lenient(p.n(), p.t(), p.rho(), &series(s)?)?;
            for (field, e) in notes {
                writeln!(stderr, "warning: {field}: {e}; using the partial sum")?;
            }
            let mut w = sink(out, stdout)?;
            match format {
                Format::Json => write_json(&summary, &mut w)?,
                Format::Csv => {
                    writeln!(w, "n,t,rho,edge_density,mean_degree,two_star_prob,triangle_prob,clustering,triangles_per_node,degree_variance")?;
                    let s = &summary;
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{},{},{},{}",
                        s.n,
                        s.t,
                        s.rho,
                        s.edge_density,
                        s.mean_degree,
                        s.two_star_prob,
                        s.triangle_prob,
                        s.clustering,
                        s.triangles_per_node,
                        s.degree_variance
                    )?;
                }
            }
            w.flush()?;
        }
        Command::DegreeDist {
            method,
            order,
            format,
            out,
            ..
        } => {
            let p = model.expect("resolved model");
            let dist = match method {
                DegreeMethodArg::Quadrature => degree_distribution(p.n(), p.t(), p.rho(), *order)?,
                DegreeMethodArg::Laplace => degree_distribution_laplace(p.n(), p.t(), p.rho())?,
            };
            if *method == DegreeMethodArg::Quadrature && dist.residual > 1e-6 {
                writeln!(stderr, "warning: probabilities sum to 1 - {:e}", dist.residual)?;
            }
            let mut w = sink(out, stdout)?;
            match format {
                Format::Csv => dist.write_csv(&mut w)?,
                Format::Json => write_json(&dist, &mut w)?,
            }
            w.flush()?;
        }
        Command::Fit { edges, out } => {
            let seq = read_degree_sequence(edges)?;
            if seq.duplicates > 0 {
                writeln!(stderr, "warning: ignored {} duplicate edge(s)", seq.duplicates)?;
            }
            let result = fit(&seq.degrees, seq.n)?;
            if let Some(flag) = result.flag {
                writeln!(stderr, "warning: rho clamped to {} ({flag:?})", result.rho)?;
            }
            let mut w = sink(out, stdout)?;
            write_json(&result, &mut w)?;
            w.flush()?;
        }
        Command::SweepGc {
            n,
            rho,
            k_min,
            k_max,
            k_step,
            samples,
            run: r,
            format,
            out,
        } => {
            let ks = grid(*k_min, *k_max, *k_step)?;
            let records = run_susceptibility_sweep(*n, *rho, &ks, *samples, r.seed, &run_options(r))?;
            let transition = find_transition(&records);
            if let Err(e) = &transition {
                writeln!(stderr, "warning: {e}")?;
            }
            let transition = transition.ok();
            match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Sweep<'a> {
                        records: &'a [threshnet::SweepRecord],
                        transition: Option<threshnet::TransitionPoint>,
                    }
                    let mut w = sink(out, stdout)?;
                    write_json(&Sweep { records: &records, transition }, &mut w)?;
                    w.flush()?;
                }
                Format::Csv => {
                    let header = [
                        ("n", n.to_string()),
                        ("rho", rho.to_string()),
                        ("k_min", k_min.to_string()),
                        ("k_max", k_max.to_string()),
                        ("k_step", k_step.to_string()),
                        ("samples", samples.to_string()),
                        ("seed", r.seed.to_string()),
                        ("sampler", format!("{:?}", r.sampler).to_lowercase()),
                    ];
                    if out.is_some() {
                        let mut w = sink(out, stdout)?;
                        write_header(&mut w, &header)?;
                        write_records_csv(&records, &mut w)?;
                        w.flush()?;
                        drop(w);
                        if let Some(tp) = &transition {
                            write_json(tp, stdout)?;
                        }
                    } else {
                        write_header(stdout, &header)?;
                        write_records_csv(&records, stdout)?;
                        if let Some(tp) = &transition {
                            writeln!(stdout, "# transition={}", serde_json::to_string(tp).map_err(io::Error::from)?)?;
                        }
                    }
                }
            }
        }
        Command::Paths {
            n_grid,
            rho_grid,
            mean_degree,
            samples,
            run: r,
            format,
            out,
        } => {
            let records = run_path_scaling(n_grid, rho_grid, *mean_degree, *samples, r.seed, &run_options(r))?;
            for rec in records.iter().filter(|rec| rec.value.is_none()) {
                writeln!(stderr, "warning: n={} rho={}: no component with two or more nodes", rec.n, rec.rho)?;
            }
            let mut w = sink(out, stdout)?;
            match format {
                Format::Json => write_json(&records, &mut w)?,
                Format::Csv => {
                    write_header(
                        &mut w,
                        &[
                            ("mean_degree", mean_degree.to_string()),
                            ("samples", samples.to_string()),
                            ("seed", r.seed.to_string()),
                            ("sampler", format!("{:?}", r.sampler).to_lowercase()),
                        ],
                    )?;
                    write_records_csv(&records, &mut w)?;
                }
            }
            w.flush()?;
        }
        Command::Disparity {
            n,
            rho,
            mean_degree,
            order,
            samples,
            run: r,
            out,
        } => {
            let alpha = solve_alpha(*n, *rho, *mean_degree, *order)?;
            let predicted = (*n - 1) as f64 * disparity_edge_density(*n, alpha, *rho, *order)?;
            let dp = DisparityParams::new(*n, *rho, alpha)?;
            let opts = run_options(r);
            let mut pooled = Vec::new();
            let mut moments = None;
            if *samples > 0 {
                pooled = pooled_disparity_degrees(&dp, *samples, r.seed, 0, &opts)?;
                let total = (*n * *samples) as f64;
                let mean = pooled.iter().enumerate().map(|(d, &c)| d as f64 * c as f64).sum::<f64>() / total;
                let var = pooled
                    .iter()
                    .enumerate()
                    .map(|(d, &c)| (d as f64 - mean).powi(2) * c as f64)
                    .sum::<f64>()
                    / total;
                moments = Some((mean, var));
            }
            let report = DisparityReport {
                n: *n,
                rho: *rho,
                target_mean_degree: *mean_degree,
                alpha,
                predicted_mean_degree: predicted,
                samples: *samples,
                realized_mean_degree: moments.map(|m| m.0),
                realized_degree_variance: moments.map(|m| m.1),
            };
            if let Some(m) = moments {
                if (m.0 / mean_degree - 1.0).abs() > 0.1 {
                    writeln!(
                        stderr,
                        "warning: realized mean degree {} differs from the target by more than 10%",
                        m.0
                    )?;
                }
            }
            write_json(&report, stdout)?;
            if out.is_some() && *samples > 0 {
                let mut w = sink(out, stdout)?;
                write_header(
                    &mut w,
                    &[
                        ("n", n.to_string()),
                        ("rho", rho.to_string()),
                        ("alpha", alpha.to_string()),
                        ("samples", samples.to_string()),
                        ("seed", r.seed.to_string()),
                    ],
                )?;
                writeln!(w, "k,count")?;
                let last = pooled.iter().rposition(|&c| c > 0).unwrap_or(0);
                for (d, c) in pooled[..=last].iter().enumerate() {
                    writeln!(w, "{d},{c}")?;
                }
                w.flush()?;
            }
        }
        Command::Figure {
            id,
            n,
            mean_degree,
            rho_grid,
            n_grid,
            k_grid,
            order,
            samples,
            edges,
            series: s,
            run: r,
            out,
        } => {
            let params = FigureParams {
                n: *n,
                mean_degree: *mean_degree,
                rho_grid: rho_grid.clone(),
                n_grid: n_grid.clone(),
                k_grid: k_grid.clone(),
                order: *order,
                samples: *samples,
                seed: r.seed,
                edges: edges.clone(),
                series: series(s)?,
                run: run_options(r),
            };
            let mut w = sink(out, stdout)?;
            let warnings = run_figure_table(id, &params, &mut w)?;
            w.flush()?;
            for msg in warnings {
                writeln!(stderr, "warning: {msg}")?;
            }
        }
    }
    Ok(())
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    match run(&config, &mut out, &mut err) {
        Ok(()) => 0,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = out.flush();
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
