//! Randomized oracle suites at full size.

mod common;

use common::props;
use common::synth::{synth_corpus, SynthParams};

fn check(result: props::Check) {
    match result {
        Ok(summary) => eprintln!("{summary}"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn kn_distributions_normalize_and_match_oracle() {
    check(props::kn_normalization(200, 11));
}

#[test]
fn uniform_prior_decisions_agree() {
    check(props::uniform_prior_equivalence(500, 12));
}

#[test]
fn svm_matches_dual_qp_oracle() {
    check(props::svm_oracle(100, 13));
}

#[test]
fn lexicon_vector_matches_brute_force() {
    check(props::lexicon_oracle(1000, 14));
}

#[test]
fn combined_blocks_have_norm_sqrt2() {
    check(props::combine_sqrt2(200, 15));
}

#[test]
fn micro_metrics_match_recount() {
    check(props::micro_metrics_recount(500, 16));
}

#[test]
fn skeptic_contains_majority() {
    check(props::meta_judge_containment(1000, 17));
}

#[test]
fn gold_shaped_fold_invariants() {
    let corpus = synth_corpus(SynthParams::default());
    for seed in 0..5 {
        check(props::fold_invariants(&corpus, 5, seed));
    }
}

#[test]
fn truncated_lognormal_recovers_parameters() {
    check(props::lognormal_recovery(20, 10_000));
}
