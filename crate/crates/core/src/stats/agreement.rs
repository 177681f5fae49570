use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::label::Label;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kappa {
    pub value: f64,
    /// Expected agreement was 1 (every rating in one category); `value` is
    /// reported as 1.
    pub degenerate: bool,
}

fn kappa(observed: f64, expected: f64) -> Kappa {
    if expected >= 1.0 {
        Kappa { value: 1.0, degenerate: true }
    } else {
        Kappa { value: (observed - expected) / (1.0 - expected), degenerate: false }
    }
}

/// Fleiss' kappa over items each rated by the same number (≥ 2) of raters.
pub fn fleiss_kappa(ratings: &[&[Label]]) -> Result<Kappa, StatsError> {
    let Some(first) = ratings.first() else {
        return Err(StatsError::TooFewSamples { needed: 1, got: 0 });
    };
    let n = first.len();
    if n < 2 {
        return Err(StatsError::TooFewSamples { needed: 2, got: n });
    }
    let mut totals = [0u64; 2];
    let mut p_bar = 0.0;
    for (i, item) in ratings.iter().enumerate() {
        if item.len() != n {
            return Err(StatsError::RaggedAnnotations { item: alloc::format!("#{i}"), expected: n, got: item.len() });
        }
        let mut counts = [0u64; 2];
        for l in item.iter() {
            counts[l.index()] += 1;
        }
        totals[0] += counts[0];
        totals[1] += counts[1];
        let agree: u64 = counts.iter().map(|c| c * c).sum::<u64>() - n as u64;
        p_bar += agree as f64 / (n * (n - 1)) as f64;
    }
    let items = ratings.len() as f64;
    p_bar /= items;
    let all = items * n as f64;
    let pe: f64 = totals.iter().map(|&t| (t as f64 / all) * (t as f64 / all)).sum();
    Ok(kappa(p_bar, pe))
}

/// Cohen's kappa for two raters.
pub fn cohen_kappa(r1: &[Label], r2: &[Label]) -> Result<Kappa, StatsError> {
    if r1.len() != r2.len() {
        return Err(StatsError::LengthMismatch(r1.len(), r2.len()));
    }
    if r1.is_empty() {
        return Err(StatsError::TooFewSamples { needed: 1, got: 0 });
    }
    let n = r1.len() as f64;
    let agree = r1.iter().zip(r2).filter(|(a, b)| a == b).count() as f64;
    let mut m1 = [0.0; 2];
    let mut m2 = [0.0; 2];
    for (a, b) in r1.iter().zip(r2) {
        m1[a.index()] += 1.0;
        m2[b.index()] += 1.0;
    }
    let pe = (m1[0] * m2[0] + m1[1] * m2[1]) / (n * n);
    Ok(kappa(agree / n, pe))
}
