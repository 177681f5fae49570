//! Fixtures shared by the integration tests: synthetic corpora written to
//! disk and reconstructed judge annotations.

#![allow(dead_code)]

#[path = "../../../core/tests/common/synth.rs"]
pub mod synth;

#[path = "../../../core/tests/common/props.rs"]
pub mod props;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use opspam_core::corpus::Review;
use opspam_core::Label;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opspam"))
}

pub fn run_bin(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Lay reviews out as `<root>/positive_polarity/<class dir>/fold<N>/<x>_<hotel>_<i>.txt`,
/// four hotels per fold in hotel order.
pub fn write_tree(root: &Path, reviews: &[Review]) {
    let hotels: Vec<&str> = {
        let mut h: Vec<&str> = reviews.iter().map(|r| r.hotel.as_str()).collect();
        h.dedup();
        h
    };
    let per_fold = hotels.len().div_ceil(5).max(1);
    let mut counters = std::collections::BTreeMap::new();
    for r in reviews {
        let fold = hotels.iter().position(|&h| h == r.hotel).unwrap() / per_fold + 1;
        let (dir, prefix) = match r.label {
            Label::Deceptive => ("deceptive_from_MTurk", "d"),
            Label::Truthful => ("truthful_from_TripAdvisor", "t"),
        };
        let n = counters.entry((r.label, r.hotel.clone())).or_insert(0);
        *n += 1;
        let path = root.join("positive_polarity").join(dir).join(format!("fold{fold}"));
        fs::create_dir_all(&path).unwrap();
        fs::write(path.join(format!("{prefix}_{}_{n}.txt", r.hotel)), &r.text).unwrap();
    }
}

/// Texts under `<dir>/texts` plus `<dir>/manifest.csv` carrying every
/// metadata column the loader understands.
pub fn write_manifest(dir: &Path, reviews: &[Review]) -> PathBuf {
    fs::create_dir_all(dir.join("texts")).unwrap();
    let mut csv = String::from("id,path,label,hotel,star_rating,first_time_author,authoring_minutes\n");
    for (i, r) in reviews.iter().enumerate() {
        let file = format!("texts/{i:04}.txt");
        fs::write(dir.join(&file), &r.text).unwrap();
        let opt = |v: Option<String>| v.unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.id,
            file,
            r.label,
            r.hotel,
            opt(r.star_rating.map(|s| s.to_string())),
            opt(r.is_first_time_author.map(|b| b.to_string())),
            opt(r.authoring_minutes.map(|t| t.to_string())),
        );
    }
    let path = dir.join("manifest.csv");
    fs::write(&path, csv).unwrap();
    path
}

/// Per-item judgments for 80 truthful and 80 deceptive items whose
/// per-judge, majority and skeptic confusion counts equal the published
/// ones: truthful correct 70/76/56 (majority 74, skeptic 48) and deceptive
/// correct 29/15/29 (majority 19, skeptic 49).
pub fn reconstructed_judgments() -> Vec<(Label, [Label; 3])> {
    use Label::{Deceptive as D, Truthful as T};
    let mut items = Vec::new();
    let mut push = |truth: Label, votes: [Label; 3], n: usize| {
        for _ in 0..n {
            items.push((truth, votes));
        }
    };
    // Truthful: 48 unanimous, 26 with one miss, 6 with a single correct vote.
    push(T, [T, T, T], 48);
    push(T, [D, T, T], 6);
    push(T, [T, T, D], 20);
    push(T, [T, D, D], 2);
    push(T, [D, T, D], 2);
    push(T, [D, D, T], 2);
    // Deceptive: 31 missed by all, 30 caught once, 14 twice, 5 by all.
    push(D, [T, T, T], 31);
    push(D, [D, T, T], 12);
    push(D, [T, D, T], 6);
    push(D, [T, T, D], 12);
    push(D, [D, D, T], 2);
    push(D, [D, T, D], 10);
    push(D, [T, D, D], 2);
    push(D, [D, D, D], 5);
    items
}

pub fn write_judges_csv(path: &Path) {
    let mut csv = String::from("item_id,true_label,judge1,judge2,judge3\n");
    for (i, (truth, v)) in reconstructed_judgments().iter().enumerate() {
        let _ = writeln!(csv, "item{i:03},{truth},{},{},{}", v[0], v[1], v[2]);
    }
    fs::write(path, csv).unwrap();
}
