//! The `opspam` command line.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, bad config,
//! unknown approach), 2 on data or validation errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use opspam_core::corpus::{assign_folds, descriptive_stats, Review};
use opspam_core::experiments::{compare_approaches, nested_cv, Approach, ApproachConfig, CvData};
use opspam_core::features::TagProvider;
use opspam_core::stats::{judge_report, Sided};
use opspam_core::svm::{average_named_weights, rank_weights, DEFAULT_C_GRID, DEFAULT_TOL};
use opspam_core::textproc::tokenize;
use opspam_core::Label;

use crate::build::{run_build, BuildParams};
use crate::config::ExperimentFile;
use crate::corpus_io::{load_corpus, load_reviews};
use crate::judges_io::load_judges;
use crate::lexicon_io::load_lexicon;
use crate::model_io::{load_model, save_model};
use crate::report;
use crate::tagged::load_tags;

pub const DEFAULT_OUT: &str = "opspam-out";

#[derive(Debug, Parser)]
#[command(name = "opspam", version, about = "Deceptive opinion spam detection toolkit")]
pub struct Cli {
    /// Experiment config file (key = value or JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Root seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Suppress summaries on stdout.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and assign hotel-blocked folds.
    Ingest {
        /// Manifest CSV or directory tree.
        source: PathBuf,
        #[arg(long, default_value_t = 5)]
        folds: usize,
    },
    /// Run nested cross-validation for one approach.
    Cv {
        #[arg(long)]
        approach: Option<String>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        tags: Option<PathBuf>,
        /// Comma-separated C values.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Average unit-normalized weights over model files and rank features.
    Weights {
        #[arg(required = true)]
        models: Vec<PathBuf>,
        #[arg(short, long, default_value_t = 15)]
        k: usize,
    },
    /// Human judge performance and agreement from an annotations CSV.
    Judges { annotations: PathBuf },
    /// Select a length-matched truthful set from a candidate pool.
    Build {
        /// Candidate pool (manifest or directory).
        #[arg(long)]
        pool: PathBuf,
        /// Deceptive reviews whose lengths define the target distribution.
        #[arg(long)]
        deceptive: PathBuf,
        #[arg(long, default_value_t = 20)]
        per_hotel: usize,
        #[arg(long, default_value_t = 150)]
        min_chars: usize,
        #[arg(long, default_value_t = 5)]
        stars: u8,
    },
    /// Descriptive statistics of authoring time and length.
    Stats {
        source: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        split: f64,
        /// Only reviews with this label.
        #[arg(long)]
        label: Option<String>,
    },
    /// Sign test between two per-item prediction files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        two_tailed: bool,
    },
    /// Print the tokens of a text file, one per line.
    Tokens { file: PathBuf },
}

/// Errors that should exit with status 1.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                1
            } else {
                2
            }
        }
    }
}

fn out_dir(cli: &Cli, from_config: Option<&Path>) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| from_config.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn say(cli: &Cli, text: &str) {
    if !cli.quiet {
        print!("{text}");
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Ingest { source, folds } => ingest(cli, source, *folds),
        Command::Cv { .. } => cv(cli),
        Command::Weights { models, k } => weights(cli, models, *k),
        Command::Judges { annotations } => judges(cli, annotations),
        Command::Build { pool, deceptive, per_hotel, min_chars, stars } => {
            let params = BuildParams {
                per_hotel: *per_hotel,
                min_chars: *min_chars,
                stars: *stars,
                seed: cli.seed.unwrap_or(0),
            };
            build(cli, pool, deceptive, params)
        }
        Command::Stats { source, split, label } => stats(cli, source, *split, label.as_deref()),
        Command::Compare { a, b, two_tailed } => compare(cli, a, b, *two_tailed),
        Command::Tokens { file } => {
            let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            for t in tokenize(&text) {
                println!("{t}");
            }
            Ok(())
        }
    }
}

fn ingest(cli: &Cli, source: &Path, k: usize) -> Result<()> {
    if k == 0 {
        return Err(usage("--folds must be positive"));
    }
    let seed = cli.seed.unwrap_or(0);
    let corpus = load_corpus(source)?;
    let plan = assign_folds(&corpus, k, seed)?;
    let summary = report::corpus_summary(&corpus, &plan, seed);
    let out = out_dir(cli, None);
    report::write_json(&out.join("corpus.json"), &summary)?;
    say(cli, &report::render_corpus_summary(&summary));
    Ok(())
}

fn cv(cli: &Cli) -> Result<()> {
    let Command::Cv { approach, corpus, lexicon, tags, grid, folds, tol } = &cli.command else {
        unreachable!()
    };
    let file = match &cli.config {
        Some(p) => ExperimentFile::load(p).map_err(|e| usage(e.to_string()))?,
        None => ExperimentFile::default(),
    };
    let approach_name = approach
        .clone()
        .or(file.approach.clone())
        .ok_or_else(|| usage("no approach given (--approach or config)"))?;
    let approach: Approach = approach_name.parse().map_err(|e: opspam_core::experiments::ExperimentError| usage(e.to_string()))?;
    let corpus_path = corpus
        .clone()
        .or(file.corpus.clone())
        .ok_or_else(|| usage("no corpus given (--corpus or config)"))?;
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let k = folds.or(file.folds).unwrap_or(5);
    let config = ApproachConfig {
        approach,
        c_grid: grid.clone().or(file.grid.clone()).unwrap_or_else(|| DEFAULT_C_GRID.to_vec()),
        seed,
        tol: tol.or(file.tol).unwrap_or(DEFAULT_TOL),
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    let lexicon_path = lexicon.clone().or(file.lexicon.clone());
    let tags_path = tags.clone().or(file.tags.clone());
    if approach.needs_lexicon() && lexicon_path.is_none() {
        return Err(usage(format!("{approach} needs --lexicon")));
    }
    if approach.needs_tags() && tags_path.is_none() {
        return Err(usage(format!("{approach} needs --tags")));
    }

    let corpus = load_corpus(&corpus_path)?;
    let plan = assign_folds(&corpus, k, seed)?;
    let lexicon = lexicon_path.as_deref().map(load_lexicon).transpose()?;
    let tags = tags_path.as_deref().map(|p| load_tags(p, &corpus)).transpose()?;
    let data = CvData::new(&corpus, &plan, lexicon.as_ref(), tags.as_ref().map(|t| t as &dyn TagProvider))?;
    let outcome = nested_cv(&data, &config)?;

    let out = out_dir(cli, file.out.as_deref());
    report::write_json(&out.join("report.json"), &outcome.report)?;
    let table = report::render_cv(&outcome.report);
    report::write_text(&out.join("table.txt"), &table)?;
    report::write_predictions(&out.join("predictions.csv"), &outcome.report.predictions)?;
    if !outcome.models.is_empty() {
        let dir = out.join("models");
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        for m in &outcome.models {
            save_model(&dir.join(format!("fold{}.json", m.fold + 1)), &m.model, &m.space)?;
        }
    }
    say(cli, &table);
    Ok(())
}

fn weights(cli: &Cli, paths: &[PathBuf], k: usize) -> Result<()> {
    let loaded = paths.iter().map(|p| load_model(p)).collect::<Result<Vec<_>, _>>()?;
    let pairs: Vec<_> = loaded.iter().map(|(s, m)| (s, m)).collect();
    let (space, avg) = average_named_weights(&pairs)?;
    let ranking = rank_weights(&avg, &space, k);
    let out = out_dir(cli, None);
    report::write_weights(&out.join("weights.csv"), &ranking)?;
    say(cli, &report::render_weights(&ranking));
    Ok(())
}

fn judges(cli: &Cli, path: &Path) -> Result<()> {
    let ann = load_judges(path)?;
    let r = judge_report(&ann)?;
    let out = out_dir(cli, None);
    report::write_json(&out.join("judges.json"), &r)?;
    let text = report::render_judges(&r);
    report::write_text(&out.join("judges.txt"), &text)?;
    say(cli, &text);
    Ok(())
}

fn build(cli: &Cli, pool: &Path, deceptive: &Path, params: BuildParams) -> Result<()> {
    let pool = load_reviews(pool)?;
    let deceptive = load_reviews(deceptive)?;
    let outcome = run_build(&pool, &deceptive, params)?;
    let out = out_dir(cli, None);
    report::write_json(&out.join("build.json"), &outcome)?;
    write_selection(&out.join("selection"), &outcome.selected)?;
    say(
        cli,
        &format!(
            "selected {} reviews; fit mu={:.4} sigma={:.4}; KS(deceptive)={:.4} KS(selected)={:.4}\n",
            outcome.selected.len(),
            outcome.fit.mu,
            outcome.fit.sigma,
            outcome.fit.ks_deceptive,
            outcome.fit.ks_selected
        ),
    );
    Ok(())
}

/// Texts plus a manifest that `ingest` can read back.
fn write_selection(dir: &Path, reviews: &[Review]) -> Result<()> {
    let texts = dir.join("texts");
    std::fs::create_dir_all(&texts).with_context(|| format!("creating {}", texts.display()))?;
    let mut w = csv::Writer::from_path(dir.join("manifest.csv"))?;
    w.write_record(["id", "path", "label", "hotel", "star_rating", "first_time_author", "author_id"])?;
    for (i, r) in reviews.iter().enumerate() {
        let file = format!("{:04}.txt", i + 1);
        std::fs::write(texts.join(&file), &r.text)?;
        w.write_record([
            r.id.as_str(),
            &format!("texts/{file}"),
            r.label.as_str(),
            r.hotel.as_str(),
            &r.star_rating.map(|s| s.to_string()).unwrap_or_default(),
            &r.is_first_time_author.map(|b| b.to_string()).unwrap_or_default(),
            r.author_id.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn stats(cli: &Cli, source: &Path, split: f64, label: Option<&str>) -> Result<()> {
    let filter: Option<Label> = label
        .map(|l| l.parse().map_err(|_| usage(format!("unknown label {l:?}"))))
        .transpose()?;
    let reviews: Vec<Review> =
        load_reviews(source)?.into_iter().filter(|r| filter.is_none_or(|l| r.label == l)).collect();
    let s = descriptive_stats(&reviews, split)?;
    let out = out_dir(cli, None);
    report::write_json(&out.join("stats.json"), &s)?;
    let text = report::render_stats(&s);
    report::write_text(&out.join("stats.txt"), &text)?;
    say(cli, &text);
    Ok(())
}

fn compare(cli: &Cli, a: &Path, b: &Path, two_tailed: bool) -> Result<()> {
    let pa = report::read_predictions(a)?;
    let pb = report::read_predictions(b)?;
    let sided = if two_tailed { Sided::TwoTailed } else { Sided::Greater };
    let r = compare_approaches(&pa, &pb, sided)?;
    let out = out_dir(cli, None);
    report::write_json(&out.join("compare.json"), &r)?;
    say(
        cli,
        &format!(
            "wins {} losses {} p = {:.4}{}\n",
            r.wins,
            r.losses,
            r.p_value,
            if r.no_discordant { " (no discordant pairs)" } else { "" }
        ),
    );
    Ok(())
}
