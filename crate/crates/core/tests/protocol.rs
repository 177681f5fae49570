//! Nested cross-validation on a synthetic gold-shaped corpus.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::synth::{synth_corpus, SynthParams};
use opspam_core::corpus::{assign_folds, Corpus, FoldPlan};
use opspam_core::experiments::{
    compare_approaches, nested_cv, Approach, ApproachConfig, CvData, CvOutcome, ExperimentError,
};
use opspam_core::features::{Category, Lexicon, TaggedSeq};
use opspam_core::hashing::FieldHasher;
use opspam_core::stats::{ConfusionCounts, Sided};
use opspam_core::svm::{average_named_weights, rank_weights};
use opspam_core::Label;

fn setup() -> (Corpus, FoldPlan) {
    let corpus = synth_corpus(SynthParams::default());
    let plan = assign_folds(&corpus, 5, 2).unwrap();
    (corpus, plan)
}

fn run(corpus: &Corpus, plan: &FoldPlan, approach: Approach, grid: &[f64]) -> CvOutcome {
    let data = CvData::new(corpus, plan, None, None).unwrap();
    let config = ApproachConfig { c_grid: grid.to_vec(), ..ApproachConfig::new(approach, 9) };
    nested_cv(&data, &config).unwrap()
}

#[test]
fn report_structure_and_no_leakage() {
    let (corpus, plan) = setup();
    let out = run(&corpus, &plan, Approach::BigramsSvm, &[1.0, 10.0]);
    let r = &out.report;
    assert_eq!(r.folds.len(), 5);
    assert_eq!(r.predictions.len(), 800);
    let sum = r.folds.iter().fold(ConfusionCounts::default(), |acc, f| acc + f.counts);
    assert_eq!(sum, r.aggregate);
    for f in &r.folds {
        assert_eq!(f.counts.support(Label::Truthful), 80);
        assert_eq!(f.counts.support(Label::Deceptive), 80);
        assert_eq!((f.train_size, f.test_size), (640, 160));
        let c = f.selection.c.unwrap();
        assert!([1.0, 10.0].contains(&c));
        // The best inner accuracy wins; ties go to the smaller C.
        let best = f.selection.inner_accuracy.iter().map(|&(_, a)| a).fold(f64::NEG_INFINITY, f64::max);
        let first_best = f.selection.inner_accuracy.iter().find(|&&(_, a)| a == best).unwrap().0;
        assert_eq!(c, first_best);

        let train: BTreeSet<&str> = corpus
            .reviews()
            .iter()
            .filter(|rv| plan.fold_of(&rv.hotel) != Some(f.fold))
            .map(|rv| rv.id.as_str())
            .collect();
        let mut h = FieldHasher::new();
        for id in &train {
            h.str(id);
        }
        assert_eq!(h.finish_hex(), f.train_ids_hash);
        let test: BTreeSet<&str> = r.predictions.iter().filter(|p| p.fold == f.fold).map(|p| p.id.as_str()).collect();
        assert!(train.is_disjoint(&test));
    }
    assert!(r.metrics.accuracy.value > 70.0, "{}", r.metrics.accuracy.value);
}

#[test]
fn held_out_tokens_never_enter_a_fold_space() {
    let (corpus, plan) = setup();
    let mut reviews = corpus.reviews().to_vec();
    for r in reviews.iter_mut() {
        let fold = plan.fold_of(&r.hotel).unwrap();
        r.text.push_str(&format!(" marker{fold}"));
        r.char_length = r.text.chars().count();
    }
    let corpus = Corpus::new(reviews).unwrap();
    let out = run(&corpus, &plan, Approach::UnigramsSvm, &[1.0]);
    for m in &out.models {
        let names: BTreeSet<&str> = m.space.iter().map(|(_, _, n)| n).collect();
        for f in 0..5 {
            assert_eq!(names.contains(format!("marker{f}").as_str()), f != m.fold);
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let (corpus, plan) = setup();
    for approach in [Approach::UnigramsSvm, Approach::BigramsNb] {
        let a = serde_json::to_string(&run(&corpus, &plan, approach, &[0.1, 1.0]).report).unwrap();
        let b = serde_json::to_string(&run(&corpus, &plan, approach, &[0.1, 1.0]).report).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn language_models_learn_the_synthetic_signal() {
    let (corpus, plan) = setup();
    for approach in [Approach::UnigramsNb, Approach::TrigramsNb] {
        let out = run(&corpus, &plan, approach, &[1.0]);
        assert!(out.models.is_empty());
        assert!(out.report.folds.iter().all(|f| f.selection.c.is_none()));
        assert!(out.report.metrics.accuracy.value > 70.0);
    }
}

#[test]
fn averaged_weights_point_at_planted_words() {
    let (corpus, plan) = setup();
    let out = run(&corpus, &plan, Approach::UnigramsSvm, &[1.0]);
    let pairs: Vec<_> = out.models.iter().map(|m| (&m.space, &m.model)).collect();
    let (space, avg) = average_named_weights(&pairs).unwrap();
    let ranking = rank_weights(&avg, &space, 10);
    let deceptive: BTreeSet<&str> = ranking.negative.iter().map(|f| f.name.as_str()).collect();
    let planted = ["chicago", "my", "hotel", "luxury", "experience", "hilton", "business", "vacation", "i", "spa"];
    assert!(planted.iter().filter(|w| deceptive.contains(*w)).count() >= 5, "{deceptive:?}");
    assert!(ranking.positive.iter().all(|f| f.weight > 0.0));
}

#[test]
fn missing_resources_are_reported() {
    let (corpus, plan) = setup();
    let data = CvData::new(&corpus, &plan, None, None).unwrap();
    let lex = ApproachConfig::new(Approach::LexiconSvm, 1);
    assert_eq!(nested_cv(&data, &lex).err(), Some(ExperimentError::MissingLexicon));
    let pos = ApproachConfig { c_grid: vec![1.0], ..ApproachConfig::new(Approach::PosSvm, 1) };
    assert!(matches!(nested_cv(&data, &pos).err(), Some(ExperimentError::MissingTags(_))));
    let bad = ApproachConfig { c_grid: vec![], ..ApproachConfig::new(Approach::UnigramsSvm, 1) };
    assert!(matches!(nested_cv(&data, &bad).err(), Some(ExperimentError::InvalidConfig(_))));
}

#[test]
fn lexicon_and_pos_approaches_run_with_resources() {
    let corpus = synth_corpus(SynthParams { hotels: 10, per_class: 6, strength: 0.1, seed: 4 });
    let plan = assign_folds(&corpus, 5, 1).unwrap();
    let lex = Lexicon::new(
        vec![
            Category { id: 1, name: "travel".into(), punct: None },
            Category { id: 2, name: "spatial".into(), punct: None },
            Category { id: 3, name: "allpunct".into(), punct: Some("().,!$-".into()) },
        ],
        &[("vacation", &[0]), ("business", &[0]), ("lux*", &[0]), ("floor", &[1]), ("loc*", &[1]), ("block", &[1])],
    )
    .unwrap();
    let tags: BTreeMap<String, TaggedSeq> = corpus
        .reviews()
        .iter()
        .map(|r| {
            let pairs = opspam_core::textproc::tokenize(&r.text)
                .into_iter()
                .map(|t| {
                    let tag = match t.as_str() {
                        "i" | "my" => "PRP",
                        "." | "!" => ".",
                        "," => ",",
                        "(" => "-LRB-",
                        ")" => "-RRB-",
                        "$" => "$",
                        _ => "NN",
                    };
                    (t, tag.to_string())
                })
                .collect();
            (r.id.clone(), TaggedSeq { pairs })
        })
        .collect();
    let data = CvData::new(&corpus, &plan, Some(&lex), Some(&tags)).unwrap();
    let mut accuracies = BTreeMap::new();
    for approach in [Approach::LexiconSvm, Approach::LexiconBigramsSvm, Approach::PosSvm] {
        let config = ApproachConfig { c_grid: vec![1.0, 10.0], ..ApproachConfig::new(approach, 3) };
        let out = nested_cv(&data, &config).unwrap();
        accuracies.insert(approach.name(), out.report.metrics.accuracy.value);
        if approach == Approach::LexiconBigramsSvm {
            let space = &out.models[0].space;
            let names: Vec<&str> = space.blocks().iter().map(|b| b.name.as_str()).collect();
            assert_eq!(names, ["lexicon", "ngrams"]);
        }
    }
    assert!(accuracies.values().all(|&a| a > 50.0), "{accuracies:?}");
}

#[test]
fn sign_test_between_approaches() {
    let (corpus, plan) = setup();
    let a = run(&corpus, &plan, Approach::UnigramsNb, &[1.0]).report.predictions;
    let b = run(&corpus, &plan, Approach::TrigramsNb, &[1.0]).report.predictions;
    let s = compare_approaches(&a, &b, Sided::TwoTailed).unwrap();
    let wins = a.iter().zip(&b).filter(|(x, y)| x.correct() && !y.correct()).count() as u64;
    assert_eq!(s.wins, wins);
    assert!((0.0..=1.0).contains(&s.p_value));
    assert_eq!(compare_approaches(&a, &b[1..], Sided::TwoTailed).err(), Some(ExperimentError::ItemMismatch));
}
