//! Randomized property checks against independent oracles.
//!
//! Each check returns `Ok(summary)` or `Err(first counterexample)`, so the
//! same code backs the per-crate tests and the acceptance report.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use opspam_core::corpus::{assign_folds, fit_truncated_lognormal, Corpus, FoldPlan, TruncLogNormalParams};
use opspam_core::experiments::CvData;
use opspam_core::features::{
    build_ngram_space, combine_blocks, lexicon_space, lexicon_vector, Category, FeatureSpace, Lexicon, SparseVector,
};
use opspam_core::hashing::FieldHasher;
use opspam_core::lm::{classify_ml, classify_with_prior, train_kn, ClassLMPair, NgramLM};
use opspam_core::stats::{meta_judge, micro_metrics, ConfusionCounts, MetaMode};
use opspam_core::svm::{primal_objective, train_linear_svm, SvmParams};
use opspam_core::textproc::{build_vocab, TokenSeq, Vocabulary};
use opspam_core::Label;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Continuous, LogNormal};

pub type Check = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_label<R: Rng>(r: &mut R) -> Label {
    if r.random_bool(0.5) { Label::Truthful } else { Label::Deceptive }
}

fn random_doc<R: Rng>(r: &mut R, words: &[&str], max_len: usize) -> TokenSeq {
    let n = r.random_range(0..=max_len);
    TokenSeq::new("d", (0..n).map(|_| words[r.random_range(0..words.len())].to_string()).collect())
}

// ---------------------------------------------------------------- language models

/// Interpolated Kneser-Ney recomputed from raw n-gram lists.
struct KnOracle {
    order: usize,
    v: usize,
    /// Per order k (index k-1): context -> word -> count (raw at the top
    /// order, continuation counts below).
    tables: Vec<HashMap<Vec<u32>, BTreeMap<u32, u64>>>,
    discounts: Vec<f64>,
}

impl KnOracle {
    fn new(docs: &[TokenSeq], order: usize, vocab: &Vocabulary, fallback: &[f64]) -> Self {
        let mut grams: Vec<Vec<u32>> = Vec::new();
        for d in docs {
            let mut ids = vec![Vocabulary::START_ID; order - 1];
            ids.extend(d.tokens.iter().map(|t| vocab.index_or_unknown(t)));
            ids.push(Vocabulary::END_ID);
            for w in ids.windows(order) {
                grams.push(w.to_vec());
            }
        }
        let mut tables = vec![HashMap::new(); order];
        for g in &grams {
            let (ctx, w) = g.split_at(order - 1);
            *tables[order - 1].entry(ctx.to_vec()).or_insert_with(BTreeMap::new).entry(w[0]).or_insert(0) += 1;
        }
        // Lower orders: number of distinct one-word left extensions.
        for k in (1..order).rev() {
            let mut types: BTreeSet<Vec<u32>> = BTreeSet::new();
            for (ctx, ws) in &tables[k] {
                for w in ws.keys() {
                    let mut g = ctx.clone();
                    g.push(*w);
                    types.insert(g);
                }
            }
            let mut t: HashMap<Vec<u32>, BTreeMap<u32, u64>> = HashMap::new();
            for g in types {
                let suffix = &g[1..];
                let (ctx, w) = suffix.split_at(suffix.len() - 1);
                *t.entry(ctx.to_vec()).or_default().entry(w[0]).or_insert(0) += 1;
            }
            tables[k - 1] = t;
        }
        let discounts = tables
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let (mut n1, mut n2) = (0u64, 0u64);
                for ws in t.values() {
                    for &c in ws.values() {
                        n1 += (c == 1) as u64;
                        n2 += (c == 2) as u64;
                    }
                }
                if n1 + 2 * n2 == 0 { fallback[k] } else { n1 as f64 / (n1 + 2 * n2) as f64 }
            })
            .collect();
        Self { order, v: vocab.len() - 1, tables, discounts }
    }

    fn prob(&self, history: &[u32], w: u32) -> f64 {
        let k = (history.len() + 1).min(self.order);
        self.p(k, history, w)
    }

    fn p(&self, k: usize, history: &[u32], w: u32) -> f64 {
        if k == 0 {
            return 1.0 / self.v as f64;
        }
        let lower = self.p(k - 1, history, w);
        let ctx = history[history.len() - (k - 1)..].to_vec();
        let Some(ws) = self.tables[k - 1].get(&ctx) else {
            return lower;
        };
        let total: u64 = ws.values().sum();
        let d = self.discounts[k - 1];
        let c = *ws.get(&w).unwrap_or(&0) as f64;
        ((c - d).max(0.0) + d * ws.len() as f64 * lower) / total as f64
    }
}

const LM_WORDS: &[&str] = &["a", "b", "c", "d", "e", "f", "g", "h"];

fn small_corpus<R: Rng>(r: &mut R) -> Vec<TokenSeq> {
    let n = r.random_range(1..=6);
    let width = r.random_range(2..=8);
    let mut docs: Vec<TokenSeq> = (0..n).map(|_| random_doc(r, &LM_WORDS[..width], 10)).collect();
    if docs.iter().all(|d| d.tokens.is_empty()) {
        docs[0].tokens.push("a".into());
    }
    docs
}

/// Every observed context's distribution sums to one, and every
/// probability matches the count-based oracle.
pub fn kn_normalization(corpora: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let mut contexts = 0usize;
    for case in 0..corpora {
        let docs = small_corpus(&mut r);
        let vocab = build_vocab(&docs, 1);
        for order in 1..=3 {
            let lm: NgramLM = train_kn(&docs, order, &vocab).map_err(|e| format!("case {case}: {e}"))?;
            let oracle = KnOracle::new(&docs, order, &vocab, lm.discounts());
            for (k, (&a, &b)) in lm.discounts().iter().zip(&oracle.discounts).enumerate() {
                if (a - b).abs() > 1e-12 {
                    return Err(format!("case {case} order {order}: discount {k} is {a}, oracle {b}"));
                }
            }
            for ctx in lm.observed_contexts() {
                let mut sum = 0.0;
                for w in lm.predictable_ids() {
                    let p = lm.prob(&ctx, w);
                    let q = oracle.prob(&ctx, w);
                    if (p - q).abs() > 1e-12 {
                        return Err(format!("case {case} order {order}: P({w}|{ctx:?}) = {p}, oracle {q}"));
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > 1e-6 {
                    return Err(format!("case {case} order {order}: context {ctx:?} sums to {sum}"));
                }
                contexts += 1;
            }
        }
    }
    Ok(format!("{corpora} corpora x orders 1-3, {contexts} contexts"))
}

/// With a uniform prior the likelihood-only and full Bayes rules agree.
pub fn uniform_prior_equivalence(docs: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let words = ["great", "room", "my", "husband", "floor", "small", "the", ",", "."];
    let mut agree = 0;
    let mut pair: Option<ClassLMPair> = None;
    for i in 0..docs {
        if i % 50 == 0 {
            let t: Vec<TokenSeq> = (0..8).map(|_| random_doc(&mut r, &words[..6], 12)).collect();
            let d: Vec<TokenSeq> = (0..8).map(|_| random_doc(&mut r, &words[3..], 12)).collect();
            let all: Vec<TokenSeq> = t.iter().chain(&d).cloned().collect();
            let vocab = build_vocab(&all, 1);
            let order = 1 + (i / 50) % 3;
            pair = Some(ClassLMPair::train(&t, &d, order, &vocab).map_err(|e| e.to_string())?);
        }
        let pair = pair.as_ref().unwrap();
        let doc = random_doc(&mut r, &words, 15);
        let a = classify_ml(pair, &doc).label;
        let b = classify_with_prior(pair, &doc);
        if a != b {
            return Err(format!("doc {i} {:?}: likelihood rule {a}, prior rule {b}", doc.tokens));
        }
        agree += 1;
    }
    Ok(format!("{agree}/{docs} decisions agree"))
}

// ---------------------------------------------------------------- SVM

fn dense_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimize ½αᵀQα − Σα over the box [0, C]ⁿ by accelerated projected
/// gradient, with Q_ij = y_i y_j (x_i·x_j + 1). Returns (α, dual value).
fn dual_qp_oracle(xs: &[Vec<f64>], ys: &[f64], c: f64) -> (Vec<f64>, f64) {
    let n = xs.len();
    let q: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| ys[i] * ys[j] * (dense_dot(&xs[i], &xs[j]) + 1.0)).collect()).collect();
    // Largest eigenvalue by power iteration, padded for safety.
    let mut v = vec![1.0; n];
    let mut lmax = 0.0;
    for _ in 0..500 {
        let qv: Vec<f64> = q.iter().map(|row| dense_dot(row, &v)).collect();
        let norm = qv.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        lmax = norm / v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = qv.iter().map(|x| x / norm).collect();
    }
    let step = 1.0 / (lmax * 1.01 + 1e-12);
    let grad = |a: &[f64]| -> Vec<f64> { q.iter().map(|row| dense_dot(row, a) - 1.0).collect() };
    let obj = |a: &[f64]| -> f64 {
        let qa: Vec<f64> = q.iter().map(|row| dense_dot(row, a)).collect();
        0.5 * dense_dot(a, &qa) - a.iter().sum::<f64>()
    };
    let mut alpha = vec![0.0; n];
    let mut yk = alpha.clone();
    let mut t = 1.0f64;
    for it in 0..400_000 {
        let g = grad(&yk);
        let next: Vec<f64> = yk.iter().zip(&g).map(|(y, g)| (y - step * g).clamp(0.0, c)).collect();
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let momentum = (t - 1.0) / t_next;
        // Restart when the objective goes up.
        if obj(&next) > obj(&alpha) {
            t = 1.0;
            yk = alpha.clone();
            continue;
        }
        yk = next.iter().zip(&alpha).map(|(a, o)| a + momentum * (a - o)).collect();
        let moved = next.iter().zip(&alpha).map(|(a, o)| (a - o).abs()).fold(0.0, f64::max);
        alpha = next;
        t = t_next;
        if it > 100 && moved < 1e-15 {
            break;
        }
    }
    let value = -obj(&alpha);
    (alpha, value)
}

/// Random instances with at most 8 points and 4 dimensions: the trained
/// model's primal objective matches the QP oracle, and the per-epoch dual
/// objective never decreases.
pub fn svm_oracle(instances: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let grid = [0.01, 0.1, 1.0, 10.0, 100.0];
    let mut worst: f64 = 0.0;
    for case in 0..instances {
        let n = r.random_range(2..=8);
        let d = r.random_range(1..=4);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        let mut labels: Vec<Label> = (0..n).map(|_| random_label(&mut r)).collect();
        labels[0] = Label::Truthful;
        labels[1] = Label::Deceptive;
        let ys: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
        let c = grid[r.random_range(0..grid.len())];
        let examples: Vec<(SparseVector, Label)> = xs
            .iter()
            .zip(&labels)
            .map(|(x, &y)| (SparseVector::from_pairs(7, x.iter().enumerate().map(|(j, &v)| (j as u32, v))), y))
            .collect();
        let params = SvmParams { tol: 1e-6, ..SvmParams::new(c, case as u64) };
        let model = train_linear_svm(&examples, d, &params).map_err(|e| format!("case {case}: {e}"))?;
        let history = &model.diagnostics.dual_history;
        for w in history.windows(2) {
            if w[1] < w[0] - 1e-9 * w[0].abs().max(1.0) {
                return Err(format!("case {case}: dual fell from {} to {}", w[0], w[1]));
            }
        }
        let (alpha, oracle_dual) = dual_qp_oracle(&xs, &ys, c);
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        for i in 0..n {
            for j in 0..d {
                w[j] += alpha[i] * ys[i] * xs[i][j];
            }
            b += alpha[i] * ys[i];
        }
        let oracle_primal = primal_objective(&examples, &w, b, c);
        // The oracle must itself be converged for the comparison to mean anything.
        let oracle_gap = (oracle_primal - oracle_dual) / oracle_dual.abs().max(1e-12);
        if oracle_gap > 1e-5 {
            return Err(format!("case {case}: oracle not converged (gap {oracle_gap})"));
        }
        let got = primal_objective(&examples, &model.w, model.b, c);
        let rel = (got - oracle_dual).abs() / oracle_dual.abs().max(1e-12);
        worst = worst.max(rel);
        if rel > 1e-4 {
            return Err(format!("case {case} (n={n}, d={d}, C={c}): objective {got} vs oracle {oracle_dual}, rel {rel:e}"));
        }
    }
    Ok(format!("{instances} instances, worst relative difference {worst:.2e}"))
}

// ---------------------------------------------------------------- lexicon

const LEX_ALPHABET: &[char] = &['a', 'b', 'c'];

fn random_word<R: Rng>(r: &mut R, max: usize) -> String {
    let n = r.random_range(1..=max);
    (0..n).map(|_| LEX_ALPHABET[r.random_range(0..LEX_ALPHABET.len())]).collect()
}

struct RandomLexicon {
    categories: Vec<Category>,
    entries: Vec<(String, Vec<usize>)>,
}

fn random_lexicon<R: Rng>(r: &mut R) -> RandomLexicon {
    let k = r.random_range(1..=5);
    let classes = [".,!", "-", "()", "$"];
    let categories = (0..k)
        .map(|i| Category {
            id: i as u32 + 1,
            name: format!("cat{i}"),
            punct: if r.random_bool(0.3) { Some(classes[r.random_range(0..classes.len())].to_string()) } else { None },
        })
        .collect();
    let m = r.random_range(0..=12);
    let entries = (0..m)
        .map(|_| {
            let mut p = random_word(r, 3);
            if r.random_bool(0.4) {
                p.push('*');
            }
            let cats: BTreeSet<usize> = (0..r.random_range(1..=k)).map(|_| r.random_range(0..k)).collect();
            (p, cats.into_iter().collect())
        })
        .collect();
    RandomLexicon { categories, entries }
}

/// Counts by scanning every pattern for every token.
fn brute_force_counts(lex: &RandomLexicon, tokens: &[String]) -> Vec<u64> {
    let mut counts = vec![0u64; lex.categories.len()];
    for tok in tokens {
        // Merge duplicate patterns first, as a dictionary file would.
        let mut literal: Option<BTreeSet<usize>> = None;
        let mut prefix: Option<(usize, BTreeSet<usize>)> = None;
        for (p, cats) in &lex.entries {
            match p.strip_suffix('*') {
                None if p == tok => literal.get_or_insert_with(BTreeSet::new).extend(cats),
                Some(stem) if tok.starts_with(stem) => match &mut prefix {
                    Some((len, set)) if *len == stem.len() => set.extend(cats),
                    Some((len, _)) if *len > stem.len() => {}
                    _ => prefix = Some((stem.len(), cats.iter().copied().collect())),
                },
                _ => {}
            }
        }
        if let Some(cats) = literal.or(prefix.map(|(_, s)| s)) {
            for c in cats {
                counts[c] += 1;
            }
        }
        for (c, cat) in lex.categories.iter().enumerate() {
            if let Some(class) = &cat.punct {
                if tok.chars().all(|ch| class.contains(ch)) {
                    counts[c] += 1;
                }
            }
        }
    }
    counts
}

/// `lexicon_vector` equals the brute-force matcher on random lexicons and
/// documents, bit for bit.
pub fn lexicon_oracle(pairs: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let puncts = [".", ",", "!", "-", "(", ")", "$", ".!", "--"];
    for case in 0..pairs {
        let spec = random_lexicon(&mut r);
        let entries: Vec<(&str, &[usize])> = spec.entries.iter().map(|(p, c)| (p.as_str(), c.as_slice())).collect();
        let lex = Lexicon::new(spec.categories.clone(), &entries).map_err(|e| format!("case {case}: {e}"))?;
        let space = lexicon_space(&lex).map_err(|e| e.to_string())?;
        let n = r.random_range(0..20);
        let tokens: Vec<String> = (0..n)
            .map(|_| if r.random_bool(0.2) { puncts[r.random_range(0..puncts.len())].to_string() } else { random_word(&mut r, 4) })
            .collect();
        let seq = TokenSeq::new("doc", tokens.clone());
        let got = lexicon_vector(&seq, &lex, &space).map_err(|e| e.to_string())?;

        let counts = brute_force_counts(&spec, &tokens);
        let rates: Vec<f64> = counts.iter().map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 }).collect();
        let norm = rates.iter().map(|v| v * v).sum::<f64>().sqrt();
        let want: Vec<(u32, f64)> = rates
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i as u32, v / norm))
            .collect();
        if got.entries() != want.as_slice() {
            return Err(format!("case {case}: tokens {tokens:?}\nentries {:?}\n got {:?}\nwant {want:?}", spec.entries, got.entries()));
        }
    }
    Ok(format!("{pairs} document/lexicon pairs match exactly"))
}

/// Two nonzero blocks combine into a vector of norm √2.
pub fn combine_sqrt2(trials: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let space = FeatureSpace::builder()
        .block("lexicon", (0..5).map(|i| format!("l{i}")))
        .and_then(|b| b.block("ngrams", (0..9).map(|i| format!("n{i}"))))
        .map_err(|e| e.to_string())?
        .build();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let mut block = |lo: u32, hi: u32| {
            let mut pairs: Vec<(u32, f64)> = Vec::new();
            for i in lo..hi {
                if r.random_bool(0.5) {
                    pairs.push((i, r.random_range(0.01..5.0)));
                }
            }
            if pairs.is_empty() {
                pairs.push((lo, 1.5));
            }
            SparseVector::from_pairs(space.id(), pairs)
        };
        let a = block(0, 5);
        let b = block(5, 14);
        let v = combine_blocks(&[a, b]).map_err(|e| e.to_string())?;
        worst = worst.max((v.norm() - 2f64.sqrt()).abs());
    }
    if worst > 1e-9 {
        return Err(format!("norm off by {worst:e}"));
    }
    Ok(format!("{trials} combined vectors, max |norm - sqrt 2| = {worst:.1e}"))
}

// ---------------------------------------------------------------- metrics and judges

/// Metrics from aggregated counts equal metrics recounted from the raw
/// prediction list.
pub fn micro_metrics_recount(sets: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    for case in 0..sets {
        let n = r.random_range(1..60);
        let pairs: Vec<(Label, Label)> = (0..n).map(|_| (random_label(&mut r), random_label(&mut r))).collect();
        let m = micro_metrics(&ConfusionCounts::from_pairs(pairs.iter().copied())).map_err(|e| e.to_string())?;
        let pct = |num: usize, den: usize| if den == 0 { (0.0, false) } else { (100.0 * num as f64 / den as f64, true) };
        let correct = pairs.iter().filter(|(t, p)| t == p).count();
        let mut want = vec![pct(correct, n)];
        for class in Label::ALL {
            let tp = pairs.iter().filter(|&&(t, p)| t == class && p == class).count();
            let pred = pairs.iter().filter(|&&(_, p)| p == class).count();
            let actual = pairs.iter().filter(|&&(t, _)| t == class).count();
            want.push(pct(tp, pred));
            want.push(pct(tp, actual));
            want.push(pct(2 * tp, pred + actual));
        }
        let got: Vec<(f64, bool)> = [
            m.accuracy,
            m.truthful.precision,
            m.truthful.recall,
            m.truthful.f1,
            m.deceptive.precision,
            m.deceptive.recall,
            m.deceptive.f1,
        ]
        .iter()
        .map(|x| (x.value, x.defined))
        .collect();
        if got != want {
            return Err(format!("case {case}: {got:?} vs recount {want:?}"));
        }
    }
    Ok(format!("{sets} prediction sets"))
}

/// Any item the majority calls deceptive, the skeptic does too.
pub fn meta_judge_containment(triples: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    for case in 0..triples {
        let n = r.random_range(1..40);
        let judges: Vec<Vec<Label>> = (0..3).map(|_| (0..n).map(|_| random_label(&mut r)).collect()).collect();
        let maj = meta_judge(&judges, MetaMode::Majority).map_err(|e| e.to_string())?;
        let skep = meta_judge(&judges, MetaMode::Skeptic).map_err(|e| e.to_string())?;
        for i in 0..n {
            if maj[i] == Label::Deceptive && skep[i] != Label::Deceptive {
                return Err(format!("case {case} item {i}"));
            }
        }
    }
    Ok(format!("{triples} random judge triples"))
}

// ---------------------------------------------------------------- folds

/// Fold partition, hotels per fold, class balance per test fold, and that
/// no test review reaches the training side or its n-gram space.
pub fn fold_invariants(corpus: &Corpus, k: usize, seed: u64) -> Check {
    let plan: FoldPlan = assign_folds(corpus, k, seed).map_err(|e| e.to_string())?;
    let per_fold = corpus.hotels().len() / k;
    let mut seen = BTreeSet::new();
    for f in 0..k {
        let hotels = plan.hotels_in(f);
        if hotels.len() != per_fold {
            return Err(format!("fold {f} has {} hotels", hotels.len()));
        }
        for &i in &plan.members(corpus, f) {
            if !seen.insert(i) {
                return Err(format!("review {i} in two folds"));
            }
        }
        let (t, d) = plan.members(corpus, f).iter().fold((0, 0), |(t, d), &i| match corpus.reviews()[i].label {
            Label::Truthful => (t + 1, d),
            Label::Deceptive => (t, d + 1),
        });
        let want = corpus.len() / (2 * k);
        if t != want || d != want {
            return Err(format!("fold {f}: {t} truthful / {d} deceptive, expected {want}/{want}"));
        }
    }
    if seen.len() != corpus.len() {
        return Err(format!("{} of {} reviews placed", seen.len(), corpus.len()));
    }

    let data = CvData::new(corpus, &plan, None, None).map_err(|e| e.to_string())?;
    for f in 0..k {
        let train_folds: Vec<usize> = (0..k).filter(|&g| g != f).collect();
        let train = data.indices_in(&train_folds);
        let test = data.indices_in(&[f]);
        let hash = |idx: &[usize]| {
            let ids: BTreeSet<&str> = idx.iter().map(|&i| corpus.reviews()[i].id.as_str()).collect();
            let mut h = FieldHasher::new();
            for id in &ids {
                h.str(id);
            }
            (ids, h.finish_hex())
        };
        let (train_ids, train_hash) = hash(&train);
        let (test_ids, test_hash) = hash(&test);
        if train_hash == test_hash || !train_ids.is_disjoint(&test_ids) {
            return Err(format!("fold {f}: training and test sets intersect"));
        }
        // Tokens that occur only in test reviews must not enter the space.
        let space = build_ngram_space(train.iter().map(|&i| &data.seqs()[i]), 1);
        let train_tokens: BTreeSet<&str> =
            train.iter().flat_map(|&i| data.seqs()[i].tokens.iter().map(String::as_str)).collect();
        for (_, _, name) in space.iter() {
            if !train_tokens.contains(name) {
                return Err(format!("fold {f}: feature {name:?} not from training data"));
            }
        }
    }
    Ok(format!("{k} folds over {} reviews", corpus.len()))
}

// ---------------------------------------------------------------- length model

/// Draw from a log-normal truncated below `t` by rejection.
pub fn sample_truncated<R: Rng>(r: &mut R, mu: f64, sigma: f64, t: f64, n: usize) -> Vec<f64> {
    let dist = rand_distr::LogNormal::new(mu, sigma).unwrap();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = dist.sample(r);
        if x > t {
            out.push(x);
        }
    }
    out
}

pub fn oracle_log_likelihood(mu: f64, sigma: f64, t: f64, xs: &[f64]) -> f64 {
    let dist = LogNormal::new(mu, sigma).unwrap();
    let tail = dist.sf(t);
    xs.iter().map(|&x| dist.ln_pdf(x)).sum::<f64>() - xs.len() as f64 * tail.ln()
}

/// Maximum-likelihood fits recover the generating parameters.
pub fn lognormal_recovery(seeds: u64, samples: usize) -> Check {
    let (mu, sigma, t) = (6.4, 0.5, 150.0);
    let mut worst: f64 = 0.0;
    for s in 0..seeds {
        let mut r = rng(1000 + s);
        let xs = sample_truncated(&mut r, mu, sigma, t, samples);
        let fit = fit_truncated_lognormal(&xs, t).map_err(|e| e.to_string())?;
        let err = (fit.params.mu - mu).abs().max((fit.params.sigma - sigma).abs());
        worst = worst.max(err);
        if err > 0.05 {
            return Err(format!("seed {s}: fitted ({}, {})", fit.params.mu, fit.params.sigma));
        }
    }
    Ok(format!("{seeds} seeds x {samples} samples, worst parameter error {worst:.4}"))
}

/// CDF of the truncated log-normal via an independent implementation.
pub fn oracle_truncated_cdf(p: &TruncLogNormalParams, x: f64) -> f64 {
    let dist = LogNormal::new(p.mu, p.sigma).unwrap();
    if x <= p.truncation_point {
        return 0.0;
    }
    let lo = dist.cdf(p.truncation_point);
    (dist.cdf(x) - lo) / (1.0 - lo)
}
