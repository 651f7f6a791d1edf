//! Heavy-tailed degree-distribution fitting: discrete power-law MLE with a
//! KS-optimal cutoff, and likelihood-ratio comparison against alternative
//! tail models (lognormal, exponential, stretched exponential, truncated
//! power law).
//!
//! The tail model is p(x) = x^(-alpha) / zeta(alpha, x_min) for integer
//! x >= x_min. For candidate cutoffs at or above 6 the closed-form
//! approximation `alpha = 1 + n / sum ln(x_i / (x_min - 1/2))` is used;
//! below that the zeta-based likelihood is maximized directly. The cutoff
//! minimizing the Kolmogorov-Smirnov distance between empirical and
//! fitted tail CDFs wins. Likelihood ratios R = L_pl - L_alt are signed so
//! R > 0 favors the power law; p-values come from the normalized
//! (Vuong-style) ratio statistic, two-sided.
//!
//! All likelihoods are discrete: degrees are integers.

use serde::Serialize;
use statrs::function::erf;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TailFitError {
    #[error("need at least {MIN_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
    #[error("degenerate sample: all values equal {0}")]
    Degenerate(u64),
    #[error("samples must be positive integers")]
    NonPositive,
}

pub const MIN_SAMPLES: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFit {
    pub alpha: f64,
    pub x_min: u64,
    /// Standard error (alpha - 1) / sqrt(n_tail).
    pub sigma_err: f64,
    /// Fraction of samples at or above x_min.
    pub tail_fraction: f64,
    /// KS distance between empirical and fitted tail CDFs.
    pub ks: f64,
    pub tail_n: usize,
    pub log_likelihood: f64,
}

/// Hurwitz zeta via Euler-Maclaurin with Bernoulli corrections.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    let cut = 16.0_f64.max(a);
    let mut sum = 0.0;
    let mut k = a;
    while k < cut {
        sum += k.powf(-s);
        k += 1.0;
    }
    let n = k;
    sum += n.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * n.powf(-s);
    // B2/2! s n^{-s-1}, B4/4! s(s+1)(s+2) n^{-s-3}, B6/6! ...
    let t1 = s * n.powf(-s - 1.0) / 12.0;
    let t2 = s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0;
    let t3 = s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * n.powf(-s - 5.0) / 30240.0;
    sum + t1 - t2 + t3
}

/// Golden-section maximization over a bracket.
fn golden_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    const PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - PHI * (hi - lo);
    let mut d = lo + PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if hi - lo < 1e-10 {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + PHI * (hi - lo);
            fd = f(d);
        }
    }
    (lo + hi) / 2.0
}

/// Discrete power-law fit by the cutoff-scanning MLE method.
pub fn fit_powerlaw(samples: &[u64]) -> Result<TailFit, TailFitError> {
    if samples.len() < MIN_SAMPLES {
        return Err(TailFitError::TooFewSamples(samples.len()));
    }
    if samples.contains(&0) {
        return Err(TailFitError::NonPositive);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let mut distinct: Vec<u64> = sorted.clone();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(TailFitError::Degenerate(distinct[0]));
    }

    // candidate cutoffs capped at the 90th percentile of distinct values,
    // and the chosen tail must keep at least 10% of the sample mass
    let cap = ((distinct.len() as f64) * 0.9).ceil() as usize;
    let candidates = &distinct[..cap.clamp(1, distinct.len() - 1)];
    let min_tail = ((sorted.len() as f64) * 0.1).ceil() as usize;

    // suffix sums of ln x over the sorted samples for O(1) tail statistics
    let ln_sorted: Vec<f64> = sorted.iter().map(|&x| (x as f64).ln()).collect();
    let mut suffix_ln = vec![0.0f64; sorted.len() + 1];
    for i in (0..sorted.len()).rev() {
        suffix_ln[i] = suffix_ln[i + 1] + ln_sorted[i];
    }

    let mut best: Option<TailFit> = None;
    for &x_min in candidates {
        let start = sorted.partition_point(|&x| x < x_min);
        let n_tail = sorted.len() - start;
        if n_tail < 2.max(min_tail) {
            continue;
        }
        let tail = &sorted[start..];
        if tail.first() == tail.last() {
            continue;
        }
        let sum_ln = suffix_ln[start];
        let n = n_tail as f64;
        let xm = x_min as f64;

        let alpha = if x_min >= 6 {
            // shifted-continuous approximation to the discrete MLE
            1.0 + n / (sum_ln - n * (xm - 0.5).ln())
        } else {
            let ll = |a: f64| -n * hurwitz_zeta(a, xm).ln() - a * sum_ln;
            golden_max(1.000_001, 25.0, ll)
        };
        if alpha <= 1.0 || !alpha.is_finite() {
            continue;
        }

        let ks = ks_distance(tail, alpha, x_min);
        let candidate = TailFit {
            alpha,
            x_min,
            sigma_err: (alpha - 1.0) / n.sqrt(),
            tail_fraction: n / sorted.len() as f64,
            ks,
            tail_n: n_tail,
            log_likelihood: powerlaw_loglik(tail, alpha, x_min),
        };
        let better = match &best {
            None => true,
            Some(b) => ks < b.ks,
        };
        if better {
            best = Some(candidate);
        }
    }
    best.ok_or(TailFitError::Degenerate(distinct[0]))
}

fn powerlaw_loglik(tail: &[u64], alpha: f64, x_min: u64) -> f64 {
    let z = hurwitz_zeta(alpha, x_min as f64);
    tail.iter()
        .map(|&x| -alpha * (x as f64).ln() - z.ln())
        .sum()
}

/// KS distance between empirical and fitted tail CDFs, evaluated at every
/// distinct tail value. Matches a direct O(n) scan of the empirical CDF.
pub fn ks_distance(sorted_tail: &[u64], alpha: f64, x_min: u64) -> f64 {
    let n = sorted_tail.len() as f64;
    let z = hurwitz_zeta(alpha, x_min as f64);
    let mut worst = 0.0f64;
    let mut i = 0usize;
    while i < sorted_tail.len() {
        let x = sorted_tail[i];
        let mut j = i;
        while j < sorted_tail.len() && sorted_tail[j] == x {
            j += 1;
        }
        // both distributions are discrete, so the CDFs are compared at the
        // atoms (inclusive)
        let emp = j as f64 / n;
        let model = 1.0 - hurwitz_zeta(alpha, (x + 1) as f64) / z;
        worst = worst.max((model - emp).abs());
        i = j;
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    Lognormal,
    Exponential,
    StretchedExponential,
    TruncatedPowerLaw,
}

impl Alternative {
    pub const ALL: [Alternative; 4] = [
        Alternative::Lognormal,
        Alternative::Exponential,
        Alternative::StretchedExponential,
        Alternative::TruncatedPowerLaw,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Alternative::Lognormal => "lognormal",
            Alternative::Exponential => "exponential",
            Alternative::StretchedExponential => "stretched_exponential",
            Alternative::TruncatedPowerLaw => "truncated_power_law",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub alternative: Alternative,
    /// Signed log-likelihood ratio; R > 0 favors the power law.
    pub r: f64,
    /// Two-sided significance of the normalized ratio.
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelComparison {
    pub rows: Vec<ComparisonRow>,
    /// Alternatives whose MLE failed to converge, with the reason.
    pub failures: Vec<(Alternative, String)>,
}

/// Fits each alternative on the tail x >= x_min and reports the signed
/// log-likelihood ratio against the fitted power law.
pub fn compare_alternatives(samples: &[u64], fit: &TailFit) -> ModelComparison {
    let mut tail: Vec<u64> = samples.iter().copied().filter(|&x| x >= fit.x_min).collect();
    tail.sort_unstable();
    let z = hurwitz_zeta(fit.alpha, fit.x_min as f64);
    let pl_ll: Vec<f64> = tail
        .iter()
        .map(|&x| -fit.alpha * (x as f64).ln() - z.ln())
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for alt in Alternative::ALL {
        match alt_loglik(alt, &tail, fit.x_min) {
            Ok(alt_ll) => {
                let diffs: Vec<f64> = pl_ll.iter().zip(&alt_ll).map(|(a, b)| a - b).collect();
                let r: f64 = diffs.iter().sum();
                let n = diffs.len() as f64;
                let mean = r / n;
                let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n;
                let p = if var <= 0.0 {
                    1.0
                } else {
                    erf::erfc(r.abs() / (2.0 * n * var).sqrt())
                };
                rows.push(ComparisonRow { alternative: alt, r, p });
            }
            Err(reason) => failures.push((alt, reason)),
        }
    }
    ModelComparison { rows, failures }
}

/// Per-sample log-likelihoods of the MLE-fitted alternative.
fn alt_loglik(alt: Alternative, tail: &[u64], x_min: u64) -> Result<Vec<f64>, String> {
    match alt {
        Alternative::Exponential => exponential_loglik(tail, x_min),
        Alternative::Lognormal => lognormal_loglik(tail, x_min),
        Alternative::StretchedExponential => stretched_loglik(tail, x_min),
        Alternative::TruncatedPowerLaw => truncated_pl_loglik(tail, x_min),
    }
}

/// Geometric tail: p(x) = (1 - e^-lambda) e^(-lambda (x - x_min)).
fn exponential_loglik(tail: &[u64], x_min: u64) -> Result<Vec<f64>, String> {
    let n = tail.len() as f64;
    let mean_excess = tail.iter().map(|&x| (x - x_min) as f64).sum::<f64>() / n;
    if mean_excess <= 0.0 {
        return Err("zero mean excess".into());
    }
    let lambda = (1.0 + 1.0 / mean_excess).ln();
    let ln_norm = (1.0 - (-lambda).exp()).ln();
    Ok(tail
        .iter()
        .map(|&x| ln_norm - lambda * (x - x_min) as f64)
        .collect())
}

fn phi(z: f64) -> f64 {
    0.5 * erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// Lognormal discretized by interval probability
/// p(x) = [Phi(z(x+1/2)) - Phi(z(x-1/2))] / [1 - Phi(z(x_min-1/2))].
fn lognormal_loglik(tail: &[u64], x_min: u64) -> Result<Vec<f64>, String> {
    let lns: Vec<f64> = tail.iter().map(|&x| (x as f64).ln()).collect();
    let n = lns.len() as f64;
    let mu0 = lns.iter().sum::<f64>() / n;
    let sd0 = (lns.iter().map(|l| (l - mu0) * (l - mu0)).sum::<f64>() / n)
        .sqrt()
        .max(1e-3);
    let ll = |mu: f64, sigma: f64| -> f64 {
        if sigma <= 1e-6 {
            return f64::NEG_INFINITY;
        }
        let lower = ((x_min as f64 - 0.5).ln() - mu) / sigma;
        let ln_tail_mass = (1.0 - phi(lower)).max(1e-300).ln();
        tail.iter()
            .map(|&x| {
                let a = phi(((x as f64 + 0.5).ln() - mu) / sigma);
                let b = phi(((x as f64 - 0.5).ln() - mu) / sigma);
                (a - b).max(1e-300).ln() - ln_tail_mass
            })
            .sum()
    };
    let (mu, sigma) = nelder_mead2(|p| ll(p[0], p[1].exp()), [mu0, sd0.ln()], 0.5)?;
    let sigma = sigma.exp();
    Ok(tail
        .iter()
        .map(|&x| {
            let lower = ((x_min as f64 - 0.5).ln() - mu) / sigma;
            let ln_tail_mass = (1.0 - phi(lower)).max(1e-300).ln();
            let a = phi(((x as f64 + 0.5).ln() - mu) / sigma);
            let b = phi(((x as f64 - 0.5).ln() - mu) / sigma);
            (a - b).max(1e-300).ln() - ln_tail_mass
        })
        .collect())
}

/// Discrete stretched exponential (Weibull) via the survival function
/// S(x) = exp(-lambda ((x - 1/2)^beta - (x_min - 1/2)^beta)), p = S(x) - S(x+1).
fn stretched_loglik(tail: &[u64], x_min: u64) -> Result<Vec<f64>, String> {
    let base = x_min as f64 - 0.5;
    let survival = |x: f64, lambda: f64, beta: f64| -> f64 {
        (-lambda * ((x - 0.5).powf(beta) - base.powf(beta))).exp()
    };
    let ll = |lambda: f64, beta: f64| -> f64 {
        if lambda <= 0.0 || beta <= 0.0 || beta > 4.0 {
            return f64::NEG_INFINITY;
        }
        tail.iter()
            .map(|&x| {
                let p = survival(x as f64, lambda, beta) - survival(x as f64 + 1.0, lambda, beta);
                p.max(1e-300).ln()
            })
            .sum()
    };
    let mean_excess = tail.iter().map(|&x| (x - x_min + 1) as f64).sum::<f64>() / tail.len() as f64;
    let l0 = (1.0 / mean_excess).max(1e-4);
    let (ln_l, ln_b) = nelder_mead2(|p| ll(p[0].exp(), p[1].exp()), [l0.ln(), 0.0], 0.5)?;
    let (lambda, beta) = (ln_l.exp(), ln_b.exp());
    Ok(tail
        .iter()
        .map(|&x| {
            let p = survival(x as f64, lambda, beta) - survival(x as f64 + 1.0, lambda, beta);
            p.max(1e-300).ln()
        })
        .collect())
}

/// Truncated power law p(x) proportional to x^(-alpha) e^(-lambda x),
/// normalized by direct summation. Lambda is kept above 1e-5 so the
/// normalization series stays summable.
fn truncated_pl_loglik(tail: &[u64], x_min: u64) -> Result<Vec<f64>, String> {
    const LAMBDA_FLOOR: f64 = 1e-5;
    let norm = |alpha: f64, lambda: f64| -> f64 {
        let mut z = 0.0;
        let mut x = x_min as f64;
        loop {
            let term = x.powf(-alpha) * (-lambda * x).exp();
            z += term;
            if term < z * 1e-14 || x > 5e7 {
                break;
            }
            x += 1.0;
        }
        z
    };
    let ll = |alpha: f64, lambda: f64| -> f64 {
        if !(0.0..=25.0).contains(&alpha) || !(LAMBDA_FLOOR..=5.0).contains(&lambda) {
            return f64::NEG_INFINITY;
        }
        let z = norm(alpha, lambda);
        tail.iter()
            .map(|&x| -alpha * (x as f64).ln() - lambda * x as f64 - z.ln())
            .sum()
    };
    let mean = tail.iter().map(|&x| x as f64).sum::<f64>() / tail.len() as f64;
    let (alpha, ln_l) = nelder_mead2(
        |p| ll(p[0], p[1].exp()),
        [1.5, (1.0 / mean).max(LAMBDA_FLOOR * 2.0).ln()],
        0.5,
    )?;
    let lambda = ln_l.exp().max(LAMBDA_FLOOR);
    let z = norm(alpha, lambda);
    Ok(tail
        .iter()
        .map(|&x| -alpha * (x as f64).ln() - lambda * x as f64 - z.ln())
        .collect())
}

/// Small fixed-budget Nelder-Mead maximizer over two parameters.
fn nelder_mead2(
    f: impl Fn([f64; 2]) -> f64,
    start: [f64; 2],
    scale: f64,
) -> Result<(f64, f64), String> {
    let mut simplex = [
        start,
        [start[0] + scale, start[1]],
        [start[0], start[1] + scale],
    ];
    let mut values = simplex.map(&f);
    if values.iter().all(|v| !v.is_finite()) {
        return Err("objective not finite at start".into());
    }
    for _ in 0..300 {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let (best, mid, worst) = (idx[0], idx[1], idx[2]);
        if (values[best] - values[worst]).abs() < 1e-10 {
            break;
        }
        let centroid = [
            (simplex[best][0] + simplex[mid][0]) / 2.0,
            (simplex[best][1] + simplex[mid][1]) / 2.0,
        ];
        let reflect = [
            2.0 * centroid[0] - simplex[worst][0],
            2.0 * centroid[1] - simplex[worst][1],
        ];
        let fr = f(reflect);
        if fr > values[best] {
            let expand = [
                centroid[0] + 2.0 * (reflect[0] - centroid[0]),
                centroid[1] + 2.0 * (reflect[1] - centroid[1]),
            ];
            let fe = f(expand);
            if fe > fr {
                simplex[worst] = expand;
                values[worst] = fe;
            } else {
                simplex[worst] = reflect;
                values[worst] = fr;
            }
        } else if fr > values[mid] {
            simplex[worst] = reflect;
            values[worst] = fr;
        } else {
            let contract = [
                (centroid[0] + simplex[worst][0]) / 2.0,
                (centroid[1] + simplex[worst][1]) / 2.0,
            ];
            let fc = f(contract);
            if fc > values[worst] {
                simplex[worst] = contract;
                values[worst] = fc;
            } else {
                for i in 0..3 {
                    if i != best {
                        simplex[i] = [
                            (simplex[i][0] + simplex[best][0]) / 2.0,
                            (simplex[i][1] + simplex[best][1]) / 2.0,
                        ];
                        values[i] = f(simplex[i]);
                    }
                }
            }
        }
    }
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    if !values[idx[0]].is_finite() {
        return Err("optimization diverged".into());
    }
    Ok((simplex[idx[0]][0], simplex[idx[0]][1]))
}

/// Seeded inverse-CDF sampler for the discrete power law on x >= x_min,
/// used by tests and synthetic benchmarks.
pub fn sample_discrete_powerlaw(
    alpha: f64,
    x_min: u64,
    n: usize,
    rng: &mut impl rand::Rng,
) -> Vec<u64> {
    let z_total = hurwitz_zeta(alpha, x_min as f64);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            // survival S(x) = zeta(alpha, x) / zeta(alpha, x_min); find the
            // smallest x with S(x+1) <= 1-u by doubling then bisecting
            let target = (1.0 - u) * z_total;
            let mut lo = x_min;
            let mut hi = x_min + 1;
            while hurwitz_zeta(alpha, (hi + 1) as f64) > target {
                lo = hi;
                hi *= 2;
                if hi > 1 << 40 {
                    break;
                }
            }
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if hurwitz_zeta(alpha, (mid + 1) as f64) > target {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            lo
        })
        .collect()
}
