//! Small descriptive-statistics helpers shared by the experiment drivers and
//! the validation suites.

use crate::specfun::norm_cdf_inv;

/// Sample mean and standard error of the mean (two-pass, `n - 1` variance).
///
/// The standard error is 0 for a single value; `None` for an empty slice.
pub fn mean_stderr(values: &[f64]) -> Option<(f64, f64)> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Some((mean, 0.0));
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (n - 1) as f64).sqrt();
    Some((mean, sd / (n as f64).sqrt()))
}

/// Single-pass (Welford) accumulator; agrees with [`mean_stderr`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
        }
    }
}

/// Population mean and variance (divide by `n`).
pub fn population_moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Pearson chi-square goodness of fit of observed counts against expected
/// probabilities. Adjacent cells are merged left to right until each has
/// an expected count of at least `min_expected`; the remainder is folded into
/// the last cell. Returns `(statistic, degrees of freedom)`.
pub fn chi_square_gof(observed: &[u64], probs: &[f64], min_expected: f64) -> (f64, usize) {
    let total: u64 = observed.iter().sum();
    let total_f = total as f64;
    let len = observed.len().max(probs.len());
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs_acc, mut exp_acc) = (0.0, 0.0);
    for k in 0..len {
        obs_acc += observed.get(k).copied().unwrap_or(0) as f64;
        exp_acc += probs.get(k).copied().unwrap_or(0.0) * total_f;
        if exp_acc >= min_expected {
            cells.push((obs_acc, exp_acc));
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += obs_acc;
        last.1 += exp_acc;
    }
    let stat = cells
        .iter()
        .map(|&(o, e)| (o - e) * (o - e) / e)
        .sum::<f64>();
    (stat, cells.len().saturating_sub(1))
}

/// Two-sample chi-square homogeneity test on two histograms. Cells are
/// merged until both pooled expected counts reach `min_expected`.
pub fn chi_square_two_sample(a: &[u64], b: &[u64], min_expected: f64) -> (f64, usize) {
    let na: f64 = a.iter().sum::<u64>() as f64;
    let nb: f64 = b.iter().sum::<u64>() as f64;
    let len = a.len().max(b.len());
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut ca, mut cb) = (0.0, 0.0);
    for k in 0..len {
        ca += a.get(k).copied().unwrap_or(0) as f64;
        cb += b.get(k).copied().unwrap_or(0) as f64;
        let pooled = (ca + cb) / (na + nb);
        if pooled * na.min(nb) >= min_expected {
            cells.push((ca, cb));
            ca = 0.0;
            cb = 0.0;
        }
    }
    if let Some(last) = cells.last_mut() {
        last.0 += ca;
        last.1 += cb;
    }
    let total = na + nb;
    let stat = cells
        .iter()
        .map(|&(oa, ob)| {
            let p = (oa + ob) / total;
            let (ea, eb) = (p * na, p * nb);
            (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb
        })
        .sum::<f64>();
    (stat, cells.len().saturating_sub(1))
}

/// Upper-tail critical value of the chi-square distribution with `df`
/// degrees of freedom at significance `alpha` (Wilson-Hilferty).
pub fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    let k = df.max(1) as f64;
    let z = norm_cdf_inv(1.0 - alpha).expect("alpha in (0, 1)");
    let a = 2.0 / (9.0 * k);
    k * (1.0 - a + z * a.sqrt()).powi(3)
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, r_squared)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (my - slope * mx, slope, r2)
}

/// Total-variation distance `0.5 * sum |p - q|` over the union of supports.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    0.5 * (0..len)
        .map(|k| (p.get(k).copied().unwrap_or(0.0) - q.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}
