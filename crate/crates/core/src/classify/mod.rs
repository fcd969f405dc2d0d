//! Contamination-aware fuzzy KNN ensemble and the attribute-weighting
//! baselines it is compared against.
//!
//! For every channel `l` the ensemble keeps that channel's training vectors.
//! A query `x = (x_1, ..., x_L)` is classified as follows:
//!
//! 1. `sim(x_l, x_{l,n}) = exp(-‖x_l − x_{l,n}‖² / 2σ_l²)`;
//! 2. the similarity is corrected by the channel's clean-signal membership
//!    with the product t-norm, `u = r_l · sim`;
//! 3. the `K` training objects with the largest `u` are kept per channel
//!    (ties go to the smaller training index);
//! 4. per class, the σ-counts (sums of `u`) of those neighbors are added
//!    over channels and normalised to sum to one.
//!
//! The `1/L` factors of the per-channel average cancel in the normalisation.
//! Cardinality of the per-class fuzzy sets is read as the σ-count; reading
//! it as the crisp size of the α-cut would turn the rule into plain
//! per-channel majority voting and is not implemented.

pub mod baseline;
pub mod mixture;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::folds::{split, stratified_folds};
use crate::eval::metrics::bac;
use crate::features::FeatureSet;
use crate::fuzzy::MembershipSpec;
use crate::occ::ChannelDetector;
use crate::seed;

pub use baseline::{baseline_predict, tune_k_knn, BaseClassifier, BaselineModel, Weighting};

pub const DEFAULT_K_GRID: [usize; 12] = [1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23];

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Population standard deviation of all pairwise Euclidean distances.
///
/// Falls back to 1 (with a warning) when the spread is zero.
pub fn sigma_from_train(x: &[Vec<f64>]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::Data(format!("sigma needs at least 2 training points, got {}", x.len())));
    }
    let mut count = 0.0;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..x.len() {
        for j in 0..i {
            let d = sq_dist(&x[i], &x[j]).sqrt();
            count += 1.0;
            let delta = d - mean;
            mean += delta / count;
            m2 += delta * (d - mean);
        }
    }
    let sigma = (m2 / count).sqrt();
    if sigma > 0.0 && sigma.is_finite() {
        Ok(sigma)
    } else {
        log::warn!("pairwise distances have zero spread; using sigma = 1");
        Ok(1.0)
    }
}

pub fn gaussian_similarity(x: &[f64], y: &[f64], sigma: f64) -> f64 {
    (-sq_dist(x, y) / (2.0 * sigma * sigma)).exp()
}

/// Product t-norm of membership and similarity.
pub fn corrected_similarity(r: f64, sim: f64) -> f64 {
    r * sim
}

/// Indices of the `k` largest values; ties resolved towards smaller index.
pub fn alpha_cut_top_k(u: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..u.len()).collect();
    idx.sort_by(|&a, &b| u[b].total_cmp(&u[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzyNeighbor {
    pub index: usize,
    pub label: usize,
    pub sim: f64,
    pub u: f64,
}

/// Normalised class supports `d_1..d_M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSupports {
    pub d: Vec<f64>,
    /// Set when nothing supported any class and `d` is uniform.
    pub fallback: bool,
}

impl ClassSupports {
    pub fn uniform(num_classes: usize) -> Self {
        Self {
            d: vec![1.0 / num_classes as f64; num_classes],
            fallback: true,
        }
    }

    /// Normalise raw non-negative class scores.
    pub fn from_raw(raw: Vec<f64>) -> Self {
        let total: f64 = raw.iter().sum();
        if total > 0.0 && total.is_finite() {
            Self {
                d: raw.into_iter().map(|v| v / total).collect(),
                fallback: false,
            }
        } else {
            Self::uniform(raw.len())
        }
    }

    /// 1-based label of the largest support, smallest label on ties.
    pub fn label(&self) -> usize {
        let mut best = 0;
        for (j, &v) in self.d.iter().enumerate() {
            if v > self.d[best] {
                best = j;
            }
        }
        best + 1
    }
}

/// Supports from per-channel neighbor lists (σ-counts summed over channels).
pub fn class_supports(neighbors: &[Vec<FuzzyNeighbor>], num_classes: usize) -> ClassSupports {
    let mut raw = vec![0.0; num_classes];
    for list in neighbors {
        for nb in list {
            raw[nb.label - 1] += nb.u;
        }
    }
    ClassSupports::from_raw(raw)
}

/// Training vectors of one channel with their kernel width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelTrainingSet {
    pub vectors: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub sigma: f64,
}

impl ChannelTrainingSet {
    pub fn new(vectors: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        let sigma = sigma_from_train(&vectors)?;
        Ok(Self { vectors, labels, sigma })
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    fn log_similarities(&self, x: &[f64]) -> Vec<f64> {
        let denom = 2.0 * self.sigma * self.sigma;
        self.vectors.iter().map(|v| -sq_dist(x, v) / denom).collect()
    }
}

/// The per-channel KNN ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FknnEnsemble {
    pub channels: Vec<ChannelTrainingSet>,
    pub num_classes: usize,
    pub k: usize,
}

/// A classified query with the per-channel memberships that shaped it.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub supports: ClassSupports,
    pub label: usize,
    pub memberships: Vec<f64>,
    /// Baselines only: all channel weights were zero and B weights were used.
    pub reverted_weights: bool,
}

impl Prediction {
    pub fn fallback(&self) -> bool {
        self.supports.fallback || self.reverted_weights
    }
}

impl FknnEnsemble {
    pub fn fit(train: &FeatureSet, k: usize) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Data("empty training set".into()));
        }
        if k == 0 || k > train.len() {
            return Err(Error::Config(format!("K = {k} must lie in 1..={}", train.len())));
        }
        let channels = (0..train.num_channels())
            .into_par_iter()
            .map(|l| ChannelTrainingSet::new(train.channel(l), train.labels.clone()))
            .collect::<Result<_>>()?;
        Ok(Self {
            channels,
            num_classes: train.num_classes,
            k,
        })
    }

    pub fn with_k(&self, k: usize) -> Self {
        Self { k, ..self.clone() }
    }

    fn check_query(&self, x: &[Vec<f64>], r: &[f64]) -> Result<()> {
        if x.len() != self.channels.len() || r.len() != self.channels.len() {
            return Err(Error::Data(format!(
                "query has {} channels and {} memberships, model has {}",
                x.len(),
                r.len(),
                self.channels.len()
            )));
        }
        for (l, (xl, ch)) in x.iter().zip(&self.channels).enumerate() {
            if xl.len() != ch.dim() {
                return Err(Error::Data(format!(
                    "channel {l}: query dimension {} differs from training dimension {}",
                    xl.len(),
                    ch.dim()
                )));
            }
        }
        if r.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Data("memberships must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// The α-cut neighbors of every channel, with literal `u = r · sim`.
    pub fn neighbors(&self, x: &[Vec<f64>], r: &[f64]) -> Result<Vec<Vec<FuzzyNeighbor>>> {
        self.check_query(x, r)?;
        Ok(self
            .channels
            .iter()
            .zip(x)
            .zip(r)
            .map(|((ch, xl), &rl)| {
                let sims: Vec<f64> = ch.log_similarities(xl).into_iter().map(f64::exp).collect();
                let u: Vec<f64> = sims.iter().map(|&s| corrected_similarity(rl, s)).collect();
                alpha_cut_top_k(&u, self.k)
                    .into_iter()
                    .map(|n| FuzzyNeighbor {
                        index: n,
                        label: ch.labels[n],
                        sim: sims[n],
                        u: u[n],
                    })
                    .collect()
            })
            .collect())
    }

    /// Class supports for a query given channel memberships `r`.
    ///
    /// Evaluated in the log domain with one common shift across channels, so
    /// supports are unchanged by the shift and remain defined when every
    /// similarity would underflow.
    pub fn supports(&self, x: &[Vec<f64>], r: &[f64]) -> Result<ClassSupports> {
        self.check_query(x, r)?;
        let mut terms: Vec<(usize, f64)> = Vec::with_capacity(self.channels.len() * self.k);
        for ((ch, xl), &rl) in self.channels.iter().zip(x).zip(r) {
            if rl <= 0.0 {
                continue;
            }
            let ls = ch.log_similarities(xl);
            let log_r = rl.ln();
            for n in alpha_cut_top_k(&ls, self.k) {
                terms.push((ch.labels[n], log_r + ls[n]));
            }
        }
        let shift = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return Ok(ClassSupports::uniform(self.num_classes));
        }
        let mut raw = vec![0.0; self.num_classes];
        for (label, lu) in terms {
            raw[label - 1] += (lu - shift).exp();
        }
        Ok(ClassSupports::from_raw(raw))
    }

    /// Prediction with explicit memberships.
    pub fn predict_with_memberships(&self, x: &[Vec<f64>], r: &[f64]) -> Result<Prediction> {
        let supports = self.supports(x, r)?;
        Ok(Prediction {
            label: supports.label(),
            supports,
            memberships: r.to_vec(),
            reverted_weights: false,
        })
    }
}

/// Memberships of a query's channels under the given detectors.
pub fn channel_memberships(x: &[Vec<f64>], detectors: &[ChannelDetector], spec: &MembershipSpec) -> Result<Vec<f64>> {
    if x.len() != detectors.len() {
        return Err(Error::Data(format!(
            "query has {} channels, {} detectors supplied",
            x.len(),
            detectors.len()
        )));
    }
    x.iter()
        .zip(detectors)
        .enumerate()
        .map(|(l, (xl, det))| {
            if xl.len() != det.model.dim() {
                return Err(Error::Data(format!(
                    "channel {l}: query dimension {} differs from detector dimension {}",
                    xl.len(),
                    det.model.dim()
                )));
            }
            Ok(spec.of_score(det.decision(xl), &det.band))
        })
        .collect()
}

/// Full inference path: detector scores, memberships, corrected supports.
pub fn fknn_predict(
    ensemble: &FknnEnsemble,
    x: &[Vec<f64>],
    detectors: &[ChannelDetector],
    spec: &MembershipSpec,
) -> Result<Prediction> {
    let r = channel_memberships(x, detectors, spec)?;
    ensemble.predict_with_memberships(x, &r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KTuning {
    pub grid: Vec<usize>,
    pub folds: usize,
    pub seed: u64,
}

impl Default for KTuning {
    fn default() -> Self {
        Self {
            grid: DEFAULT_K_GRID.to_vec(),
            folds: 4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KSelection {
    pub k: usize,
    /// Mean selection-fold BAC per K; empty when the grid has one value.
    pub scores: Vec<(usize, f64)>,
}

/// Pick `K` by stratified cross-validated BAC on clean training data.
///
/// `predict(train, test, k)` must return labels for `test`. Grid values
/// larger than a training split are clipped to its size. Ties go to the
/// smaller `K`.
pub fn tune_k<F>(train: &FeatureSet, cfg: &KTuning, predict: F) -> Result<KSelection>
where
    F: Fn(&FeatureSet, &FeatureSet, usize) -> Result<Vec<usize>> + Sync,
{
    let mut grid = cfg.grid.clone();
    grid.sort_unstable();
    grid.dedup();
    if grid.is_empty() || grid[0] == 0 {
        return Err(Error::Config("K grid must be non-empty and positive".into()));
    }
    if grid.len() == 1 {
        return Ok(KSelection {
            k: grid[0],
            scores: Vec::new(),
        });
    }
    let assignment = stratified_folds(&train.labels, cfg.folds, seed::derive(cfg.seed, &[0]))?;
    let per_fold: Vec<Vec<f64>> = (0..cfg.folds)
        .into_par_iter()
        .map(|f| {
            let (tr, te) = split(&assignment, f);
            let (tr, te) = (train.subset(&tr), train.subset(&te));
            grid.iter()
                .map(|&k| {
                    let pred = predict(&tr, &te, k.min(tr.len()))?;
                    Ok(bac(&te.labels, &pred, train.num_classes))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let scores: Vec<(usize, f64)> = grid
        .iter()
        .enumerate()
        .map(|(g, &k)| (k, per_fold.iter().map(|f| f[g]).sum::<f64>() / cfg.folds as f64))
        .collect();
    let mut best = scores[0];
    for &s in &scores[1..] {
        if s.1 > best.1 {
            best = s;
        }
    }
    Ok(KSelection { k: best.0, scores })
}

/// K tuning for the ensemble with all memberships at 1.
pub fn tune_k_fknn(train: &FeatureSet, cfg: &KTuning) -> Result<KSelection> {
    tune_k(train, cfg, |tr, te, k| {
        let ens = FknnEnsemble::fit(tr, k)?;
        let ones = vec![1.0; tr.num_channels()];
        te.rows
            .iter()
            .map(|x| ens.supports(x, &ones).map(|s| s.label()))
            .collect()
    })
}
