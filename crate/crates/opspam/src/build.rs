//! Assembling a length-matched truthful set: filter the candidate pool, fit
//! a left-truncated log-normal to the deceptive lengths, and sample per hotel.

use serde::Serialize;

use opspam_core::corpus::{
    filter_candidates, fit_truncated_lognormal, ks_distance, sample_length_matched, CorpusError, FilterTally,
    LogNormalFit, Review,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BuildParams {
    pub per_hotel: usize,
    pub min_chars: usize,
    pub stars: u8,
    pub seed: u64,
}

impl Default for BuildParams {
    fn default() -> Self {
        Self { per_hotel: 20, min_chars: 150, stars: 5, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitDiagnostics {
    pub mu: f64,
    pub sigma: f64,
    pub truncation_point: f64,
    pub log_likelihood: f64,
    pub iterations: usize,
    /// KS distance of the deceptive lengths from the fitted distribution.
    pub ks_deceptive: f64,
    /// KS distance of the selected lengths from the fitted distribution.
    pub ks_selected: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BuildOutcome {
    pub params: BuildParams,
    pub tally: FilterTally,
    pub fit: FitDiagnostics,
    #[serde(skip)]
    pub selected: Vec<Review>,
}

fn char_lengths(reviews: &[Review]) -> Vec<f64> {
    reviews.iter().map(|r| r.char_length as f64).collect()
}

pub fn run_build(pool: &[Review], deceptive: &[Review], params: BuildParams) -> Result<BuildOutcome, CorpusError> {
    let (kept, tally) = filter_candidates(pool, params.min_chars, params.stars);
    let lengths = char_lengths(deceptive);
    let LogNormalFit { params: dist, log_likelihood, iterations } =
        fit_truncated_lognormal(&lengths, params.min_chars as f64)?;
    let selected = sample_length_matched(&kept, &dist, params.per_hotel, params.seed)?;
    let fit = FitDiagnostics {
        mu: dist.mu,
        sigma: dist.sigma,
        truncation_point: dist.truncation_point,
        log_likelihood,
        iterations,
        ks_deceptive: ks_distance(&lengths, &dist),
        ks_selected: ks_distance(&char_lengths(&selected), &dist),
    };
    Ok(BuildOutcome { params, tally, fit, selected })
}
