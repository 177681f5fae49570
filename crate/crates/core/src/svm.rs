//! Linear soft-margin SVM trained by dual coordinate descent.
//!
//! The bias is an extra constant feature of value 1, so it is regularized
//! together with the weights. Labels use the project-wide sign convention:
//! truthful is +1, deceptive is -1.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::{FeatureSpace, SparseVector};
use crate::hashing::derive_seed;
use crate::label::Label;
use crate::math;

pub const MODEL_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_MAX_EPOCHS: usize = 10_000;
pub const DEFAULT_C_GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SvmError {
    #[error("no training examples")]
    Empty,
    #[error("training data holds only {0} examples")]
    SingleClass(Label),
    #[error("C must be positive and finite, got {0}")]
    BadC(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTol(f64),
    #[error("vector belongs to space {got:#x}, model expects {expected:#x}")]
    SpaceMismatch { expected: u64, got: u64 },
    #[error("feature index {index} outside dimension {dim}")]
    IndexOutOfRange { index: u32, dim: usize },
    #[error("no convergence after {} epochs (relative gap {:.3e})", .0.epochs, .0.relative_gap)]
    NonConvergence(TrainDiagnostics),
    #[error("model file version {0} is not supported")]
    Version(u32),
    #[error("no models to average")]
    NoModels,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub tol: f64,
    pub seed: u64,
    pub max_epochs: usize,
}

impl SvmParams {
    pub fn new(c: f64, seed: u64) -> Self {
        Self { c, tol: DEFAULT_TOL, seed, max_epochs: DEFAULT_MAX_EPOCHS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainDiagnostics {
    pub epochs: usize,
    pub primal: f64,
    pub dual: f64,
    /// (primal - dual) / max(1, |primal|).
    pub relative_gap: f64,
    /// Largest projected-gradient magnitude in the final epoch.
    pub max_violation: f64,
    /// Dual objective after each epoch.
    pub dual_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub space_id: u64,
    pub w: Vec<f64>,
    pub b: f64,
    pub c: f64,
    pub diagnostics: TrainDiagnostics,
    /// Dual variables, one per training example.
    pub alpha: Vec<f64>,
}

fn check_vector(x: &SparseVector, space_id: u64, dim: usize) -> Result<(), SvmError> {
    if x.space_id() != space_id {
        return Err(SvmError::SpaceMismatch { expected: space_id, got: x.space_id() });
    }
    match x.max_index() {
        Some(i) if i as usize >= dim => Err(SvmError::IndexOutOfRange { index: i, dim }),
        _ => Ok(()),
    }
}

/// Primal objective ½(‖w‖² + b²) + C·Σ hinge.
pub fn primal_objective(examples: &[(SparseVector, Label)], w: &[f64], b: f64, c: f64) -> f64 {
    let reg = 0.5 * (w.iter().map(|v| v * v).sum::<f64>() + b * b);
    let loss: f64 = examples
        .iter()
        .map(|(x, y)| {
            let m = y.sign() * (x.dot_dense(w) + b);
            if m < 1.0 { 1.0 - m } else { 0.0 }
        })
        .sum();
    reg + c * loss
}

/// Train on `examples` in a space of `dim` features.
pub fn train_linear_svm(examples: &[(SparseVector, Label)], dim: usize, params: &SvmParams) -> Result<LinearModel, SvmError> {
    let Some((first, _)) = examples.first() else {
        return Err(SvmError::Empty);
    };
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(SvmError::BadC(params.c));
    }
    if !(params.tol > 0.0 && params.tol.is_finite()) {
        return Err(SvmError::BadTol(params.tol));
    }
    let space_id = first.space_id();
    for (x, _) in examples {
        check_vector(x, space_id, dim)?;
    }
    for label in Label::ALL {
        if examples.iter().all(|(_, y)| *y == label) {
            return Err(SvmError::SingleClass(label));
        }
    }

    let c = params.c;
    let n = examples.len();
    let ys: Vec<f64> = examples.iter().map(|(_, y)| y.sign()).collect();
    let qii: Vec<f64> = examples
        .iter()
        .map(|(x, _)| x.entries().iter().map(|&(_, v)| v * v).sum::<f64>() + 1.0)
        .collect();
    let mut alpha = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; dim];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, "svm"));
    let mut history = Vec::new();
    let mut diag = TrainDiagnostics {
        epochs: 0,
        primal: 0.0,
        dual: 0.0,
        relative_gap: f64::INFINITY,
        max_violation: f64::INFINITY,
        dual_history: Vec::new(),
    };

    for epoch in 1..=params.max_epochs {
        order.shuffle(&mut rng);
        let mut max_pg: f64 = 0.0;
        for &i in &order {
            let x = &examples[i].0;
            let g = ys[i] * (x.dot_dense(&w) + b) - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= c {
                g.max(0.0)
            } else {
                g
            };
            max_pg = max_pg.max(math::fabs(pg));
            if pg != 0.0 {
                let old = alpha[i];
                let new = (old - g / qii[i]).clamp(0.0, c);
                let step = (new - old) * ys[i];
                if step != 0.0 {
                    alpha[i] = new;
                    for &(j, v) in x.entries() {
                        w[j as usize] += step * v;
                    }
                    b += step;
                }
            }
        }

        let sq = w.iter().map(|v| v * v).sum::<f64>() + b * b;
        let dual = alpha.iter().sum::<f64>() - 0.5 * sq;
        if let Some(&prev) = history.last() {
            let slack = 1e-9 * math::fabs(prev).max(1.0);
            debug_assert!(dual >= prev - slack, "dual objective fell from {prev} to {dual}");
        }
        history.push(dual);
        let primal = primal_objective(examples, &w, b, c);
        let rel_gap = (primal - dual) / math::fabs(primal).max(1.0);
        diag.epochs = epoch;
        diag.primal = primal;
        diag.dual = dual;
        diag.relative_gap = rel_gap;
        diag.max_violation = max_pg;
        if max_pg < params.tol && rel_gap <= params.tol {
            break;
        }
    }
    diag.dual_history = history;

    if diag.relative_gap > 10.0 * params.tol {
        return Err(SvmError::NonConvergence(diag));
    }
    Ok(LinearModel { space_id, w, b, c, diagnostics: diag, alpha })
}

impl LinearModel {
    pub fn margin(&self, x: &SparseVector) -> Result<f64, SvmError> {
        check_vector(x, self.space_id, self.w.len())?;
        Ok(x.dot_dense(&self.w) + self.b)
    }

    /// Label by the sign of w·x + b; a zero margin counts as truthful.
    pub fn predict(&self, x: &SparseVector) -> Result<(Label, f64), SvmError> {
        let m = self.margin(x)?;
        Ok((Label::from_margin(m), m))
    }

    pub fn to_data(&self, space: &FeatureSpace) -> LinearModelData {
        LinearModelData {
            version: MODEL_FORMAT_VERSION,
            space_id: self.space_id,
            space_hash: space.layout_hash(),
            dim: self.w.len(),
            c: self.c,
            b: self.b,
            w: self
                .w
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, &v)| (i as u32, v))
                .collect(),
            diagnostics: TrainDiagnostics { dual_history: Vec::new(), ..self.diagnostics.clone() },
        }
    }

    pub fn from_data(data: LinearModelData) -> Result<LinearModel, SvmError> {
        if data.version != MODEL_FORMAT_VERSION {
            return Err(SvmError::Version(data.version));
        }
        let mut w = alloc::vec![0.0; data.dim];
        for (i, v) in data.w {
            let slot = w
                .get_mut(i as usize)
                .ok_or(SvmError::IndexOutOfRange { index: i, dim: data.dim })?;
            *slot = v;
        }
        Ok(LinearModel {
            space_id: data.space_id,
            w,
            b: data.b,
            c: data.c,
            diagnostics: data.diagnostics,
            alpha: Vec::new(),
        })
    }
}

/// Serialized form of a model: sparse weights plus the layout hash of the
/// space it was trained in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModelData {
    pub version: u32,
    pub space_id: u64,
    pub space_hash: String,
    pub dim: usize,
    pub c: f64,
    pub b: f64,
    pub w: Vec<(u32, f64)>,
    pub diagnostics: TrainDiagnostics,
}

/// Mean of the unit-normalized weight vectors (bias excluded).
pub fn average_normalized_weights(models: &[&LinearModel]) -> Result<Vec<f64>, SvmError> {
    let Some(first) = models.first() else {
        return Err(SvmError::NoModels);
    };
    let dim = first.w.len();
    let mut avg = alloc::vec![0.0; dim];
    for m in models {
        if m.space_id != first.space_id {
            return Err(SvmError::SpaceMismatch { expected: first.space_id, got: m.space_id });
        }
        let norm = math::l2_norm(m.w.iter().copied());
        if norm > 0.0 {
            for (a, v) in avg.iter_mut().zip(&m.w) {
                *a += v / norm;
            }
        }
    }
    let k = models.len() as f64;
    for a in &mut avg {
        *a /= k;
    }
    Ok(avg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub index: u32,
    pub block: String,
    pub name: String,
    pub weight: f64,
}

/// Top features on each side of a weight vector.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WeightRanking {
    /// Largest positive weights (truthful side), strongest first.
    pub positive: Vec<RankedFeature>,
    /// Most negative weights (deceptive side), strongest first.
    pub negative: Vec<RankedFeature>,
}

/// Up to `k` strictly positive and `k` strictly negative weights ranked by
/// magnitude; ties go to the lower index.
pub fn rank_weights(weights: &[f64], space: &FeatureSpace, k: usize) -> WeightRanking {
    let make = |i: usize| {
        let (block, name) = space.name(i as u32).unwrap_or(("", ""));
        RankedFeature { index: i as u32, block: block.into(), name: name.into(), weight: weights[i] }
    };
    let mut pos: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    let mut neg: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] < 0.0).collect();
    pos.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    neg.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(a.cmp(&b)));
    WeightRanking {
        positive: pos.into_iter().take(k).map(make).collect(),
        negative: neg.into_iter().take(k).map(make).collect(),
    }
}

/// Average unit-normalized weights of models trained in different spaces,
/// matching features by (block, name). A feature missing from a model's
/// space counts as weight 0 there. Output is sorted by (block, name), and
/// the returned space holds exactly those features.
pub fn average_named_weights(models: &[(&FeatureSpace, &LinearModel)]) -> Result<(FeatureSpace, Vec<f64>), SvmError> {
    use alloc::collections::BTreeMap;
    if models.is_empty() {
        return Err(SvmError::NoModels);
    }
    let mut acc: BTreeMap<(String, String), f64> = BTreeMap::new();
    for (space, model) in models {
        if space.id() != model.space_id {
            return Err(SvmError::SpaceMismatch { expected: space.id(), got: model.space_id });
        }
        let norm = math::l2_norm(model.w.iter().copied());
        for (i, block, name) in space.iter() {
            let v = model.w.get(i as usize).copied().unwrap_or(0.0);
            let slot = acc.entry((block.into(), name.into())).or_insert(0.0);
            if norm > 0.0 {
                *slot += v / norm;
            }
        }
    }
    let k = models.len() as f64;
    let mut blocks: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut weights = Vec::with_capacity(acc.len());
    for ((block, name), v) in acc {
        blocks.entry(block).or_default().push(name);
        weights.push(v / k);
    }
    let mut builder = FeatureSpace::builder();
    for (block, names) in blocks {
        builder = builder.block(&block, names).expect("keys are unique");
    }
    Ok((builder.build(), weights))
}

/// Ranking of one model's unit-normalized weights.
pub fn top_weights(model: &LinearModel, space: &FeatureSpace, k: usize) -> WeightRanking {
    let avg = average_normalized_weights(&[model]).unwrap_or_default();
    rank_weights(&avg, space, k)
}
