//! Left-truncated log-normal length model: maximum-likelihood fit, inverse-CDF
//! sampling and nearest-length candidate selection.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CorpusError, Review};
use crate::hashing::derive_seed;
use crate::math::{self, ln, normal_ln_pdf, normal_quantile, normal_sf};

const MIN_SAMPLES: usize = 10;
const MAX_ITERATIONS: usize = 500;
const CONVERGENCE: f64 = 1e-9;

/// Log-normal distribution conditioned on exceeding `truncation_point`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncLogNormalParams {
    /// Location on the log scale.
    pub mu: f64,
    /// Spread on the log scale.
    pub sigma: f64,
    pub truncation_point: f64,
}

impl TruncLogNormalParams {
    pub fn new(mu: f64, sigma: f64, truncation_point: f64) -> Result<Self, CorpusError> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(CorpusError::InvalidParams("sigma must be positive and finite"));
        }
        if !(truncation_point > 0.0) || !truncation_point.is_finite() {
            return Err(CorpusError::InvalidParams("truncation point must be positive and finite"));
        }
        if !mu.is_finite() {
            return Err(CorpusError::InvalidParams("mu must be finite"));
        }
        Ok(Self { mu, sigma, truncation_point })
    }

    /// Standardized truncation point.
    fn alpha(&self) -> f64 {
        (ln(self.truncation_point) - self.mu) / self.sigma
    }

    /// CDF of the truncated distribution.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.truncation_point {
            return 0.0;
        }
        let z = (ln(x) - self.mu) / self.sigma;
        let ratio = math::exp(ln_normal_sf(z) - ln_normal_sf(self.alpha()));
        (1.0 - ratio).clamp(0.0, 1.0)
    }

    /// Log-likelihood of a sample (lengths on the original scale).
    pub fn log_likelihood(&self, lengths: &[f64]) -> f64 {
        log_likelihood(self.mu, self.sigma, self.truncation_point, lengths)
    }

    /// Draw one length by inverting the truncated CDF.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        // u in (0, 1), never exactly 0.
        let u = ((rng.random::<u64>() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
        self.quantile(u)
    }

    /// Inverse CDF, parametrized by the upper-tail probability `u` in (0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        // If Z > alpha then Q(Z) is uniform on (0, Q(alpha)).
        let tail = math::exp(ln(u) + ln_normal_sf(self.alpha()));
        let z = -normal_quantile(tail);
        math::exp(self.mu + self.sigma * z).max(self.truncation_point)
    }
}

/// ln(1 − Φ(z)), with an asymptotic expansion far in the upper tail.
fn ln_normal_sf(z: f64) -> f64 {
    if z < 35.0 {
        ln(normal_sf(z))
    } else {
        let z2 = z * z;
        normal_ln_pdf(z) - ln(z) + ln(1.0 - 1.0 / z2 + 3.0 / (z2 * z2))
    }
}

/// Inverse Mills ratio φ(z)/(1 − Φ(z)).
fn mills(z: f64) -> f64 {
    math::exp(normal_ln_pdf(z) - ln_normal_sf(z))
}

fn log_likelihood(mu: f64, sigma: f64, truncation: f64, lengths: &[f64]) -> f64 {
    let n = lengths.len() as f64;
    let alpha = (ln(truncation) - mu) / sigma;
    let mut ll = -n * (ln(sigma) + ln_normal_sf(alpha));
    for &x in lengths {
        let y = ln(x);
        let z = (y - mu) / sigma;
        ll += normal_ln_pdf(z) - y;
    }
    ll
}

/// Gradient with respect to (mu, ln sigma).
fn gradient(mu: f64, sigma: f64, truncation: f64, logs: &[f64]) -> [f64; 2] {
    let n = logs.len() as f64;
    let alpha = (ln(truncation) - mu) / sigma;
    let lambda = mills(alpha);
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for &y in logs {
        let d = y - mu;
        s1 += d;
        s2 += d * d;
    }
    let d_mu = s1 / (sigma * sigma) - n * lambda / sigma;
    let d_sigma = -n / sigma + s2 / (sigma * sigma * sigma) - n * lambda * alpha / sigma;
    [d_mu, d_sigma * sigma]
}

/// Result of [`fit_truncated_lognormal`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalFit {
    pub params: TruncLogNormalParams,
    pub log_likelihood: f64,
    pub iterations: usize,
}

/// Maximum-likelihood (mu, sigma) of a log-normal left-truncated at
/// `truncation_point`.
///
/// Newton's method on (mu, ln sigma) with a numerically differentiated
/// Hessian and a backtracking line search, started from the untruncated
/// estimate. Stops once an accepted step improves the log-likelihood by less
/// than 1e-9.
pub fn fit_truncated_lognormal(lengths: &[f64], truncation_point: f64) -> Result<LogNormalFit, CorpusError> {
    if !(truncation_point > 0.0) {
        return Err(CorpusError::InvalidParams("truncation point must be positive"));
    }
    if lengths.len() < MIN_SAMPLES {
        return Err(CorpusError::TooFewSamples { needed: MIN_SAMPLES, got: lengths.len() });
    }
    if let Some(&value) = lengths.iter().find(|&&x| !(x >= truncation_point)) {
        return Err(CorpusError::BelowTruncation { value, truncation_point });
    }
    let logs: Vec<f64> = lengths.iter().map(|&x| ln(x)).collect();
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / n;
    if !(var > 0.0) {
        return Err(CorpusError::InvalidParams("all lengths are identical"));
    }

    let objective = |t: [f64; 2]| log_likelihood(t[0], math::exp(t[1]), truncation_point, lengths);
    let grad = |t: [f64; 2]| gradient(t[0], math::exp(t[1]), truncation_point, &logs);

    let mut theta = [mean, 0.5 * ln(var)];
    let mut value = objective(theta);
    for iteration in 1..=MAX_ITERATIONS {
        let g = grad(theta);
        let h = numeric_hessian(&grad, theta);
        let direction = newton_direction(g, h).unwrap_or(g);

        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-14 {
            let cand = [theta[0] + step * direction[0], theta[1] + step * direction[1]];
            let v = objective(cand);
            if v.is_finite() && v >= value {
                accepted = Some((cand, v));
                break;
            }
            step *= 0.5;
        }
        let grad_small = math::sqrt(g[0] * g[0] + g[1] * g[1]) <= 1e-6 * n;
        match accepted {
            Some((cand, v)) => {
                let improvement = v - value;
                theta = cand;
                value = v;
                if improvement < CONVERGENCE && grad_small {
                    return finish(theta, value, truncation_point, iteration);
                }
            }
            None if grad_small => return finish(theta, value, truncation_point, iteration),
            None => break,
        }
    }
    Err(CorpusError::NonConvergence {
        iterations: MAX_ITERATIONS,
        mu: theta[0],
        sigma: math::exp(theta[1]),
        log_likelihood: value,
    })
}

fn finish(theta: [f64; 2], value: f64, truncation: f64, iterations: usize) -> Result<LogNormalFit, CorpusError> {
    Ok(LogNormalFit {
        params: TruncLogNormalParams::new(theta[0], math::exp(theta[1]), truncation)?,
        log_likelihood: value,
        iterations,
    })
}

fn numeric_hessian(grad: &dyn Fn([f64; 2]) -> [f64; 2], t: [f64; 2]) -> [[f64; 2]; 2] {
    let mut h = [[0.0; 2]; 2];
    for j in 0..2 {
        let eps = 1e-5 * t[j].abs().max(1.0);
        let mut up = t;
        let mut down = t;
        up[j] += eps;
        down[j] -= eps;
        let gu = grad(up);
        let gd = grad(down);
        for i in 0..2 {
            h[i][j] = (gu[i] - gd[i]) / (2.0 * eps);
        }
    }
    let off = 0.5 * (h[0][1] + h[1][0]);
    h[0][1] = off;
    h[1][0] = off;
    h
}

/// −H⁻¹g when H is negative definite.
fn newton_direction(g: [f64; 2], h: [[f64; 2]; 2]) -> Option<[f64; 2]> {
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if !(h[0][0] < 0.0 && det > 0.0) {
        return None;
    }
    let inv = [[h[1][1] / det, -h[0][1] / det], [-h[1][0] / det, h[0][0] / det]];
    Some([
        -(inv[0][0] * g[0] + inv[0][1] * g[1]),
        -(inv[1][0] * g[0] + inv[1][1] * g[1]),
    ])
}

/// One-sample Kolmogorov–Smirnov distance between `lengths` and the
/// truncated log-normal CDF.
pub fn ks_distance(lengths: &[f64], params: &TruncLogNormalParams) -> f64 {
    if lengths.is_empty() {
        return 0.0;
    }
    let mut sorted = lengths.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = params.cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// Pick `per_hotel` reviews per hotel whose character lengths follow the
/// truncated log-normal.
///
/// For each hotel (in sorted order), `per_hotel` target lengths are drawn and
/// each target takes the unused candidate with the nearest `char_length`;
/// ties go to the shorter candidate, then to the smaller id. Candidates
/// shorter than the truncation point are never eligible.
pub fn sample_length_matched(
    pool: &[Review],
    params: &TruncLogNormalParams,
    per_hotel: usize,
    seed: u64,
) -> Result<Vec<Review>, CorpusError> {
    let mut by_hotel: BTreeMap<&str, Vec<&Review>> = BTreeMap::new();
    for r in pool {
        let entry = by_hotel.entry(r.hotel.as_str()).or_default();
        if r.char_length as f64 >= params.truncation_point {
            entry.push(r);
        }
    }
    for (hotel, cands) in &by_hotel {
        if cands.len() < per_hotel {
            return Err(CorpusError::InsufficientCandidates {
                hotel: (*hotel).into(),
                needed: per_hotel,
                available: cands.len(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "length-match"));
    let mut selected = Vec::with_capacity(per_hotel * by_hotel.len());
    for cands in by_hotel.values_mut() {
        cands.sort_by(|a, b| a.char_length.cmp(&b.char_length).then_with(|| a.id.cmp(&b.id)));
        let mut used = alloc::vec![false; cands.len()];
        for _ in 0..per_hotel {
            let target = params.sample(&mut rng);
            let mut best: Option<(usize, f64)> = None;
            for (i, c) in cands.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let dist = (c.char_length as f64 - target).abs();
                if best.is_none_or(|(_, d)| dist < d) {
                    best = Some((i, dist));
                }
            }
            let (i, _) = best.expect("enough candidates checked above");
            used[i] = true;
            selected.push(cands[i].clone());
        }
    }
    Ok(selected)
}
