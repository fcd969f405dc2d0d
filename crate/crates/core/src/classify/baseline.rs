//! Attribute-weighting baselines.
//!
//! Every channel gets one weight which is broadcast to all of its
//! attributes:
//!
//! - `B`: 1 everywhere;
//! - `AW`: the channel's clean-signal membership `r_l`;
//! - `AWc`: 1 when the detector puts the channel on the clean side of its
//!   crisp boundary, else 0.
//!
//! KNN folds the weights into the squared Euclidean distance. The naive Bayes
//! variants use them as exponents on the per-attribute likelihoods.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mixture::{gaussian_log_pdf, Mixture1d, VARIANCE_FLOOR};
use super::{alpha_cut_top_k, sigma_from_train, ClassSupports, Prediction};
use crate::error::{Error, Result};
use crate::eval::folds::{split, stratified_folds};
use crate::eval::metrics::bac;
use crate::features::FeatureSet;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Weighting {
    B,
    AW,
    AWc,
}

impl Weighting {
    pub const ALL: [Weighting; 3] = [Weighting::B, Weighting::AW, Weighting::AWc];

    pub fn tag(self) -> &'static str {
        match self {
            Weighting::B => "B",
            Weighting::AW => "AW",
            Weighting::AWc => "AWc",
        }
    }

    /// Channel weights from memberships `r` and band coordinates `t`.
    pub fn weights(self, r: &[f64], t: &[f64]) -> Vec<f64> {
        match self {
            Weighting::B => vec![1.0; r.len()],
            Weighting::AW => r.to_vec(),
            Weighting::AWc => t.iter().map(|&t| if t >= 0.5 { 1.0 } else { 0.0 }).collect(),
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BaseClassifier {
    Knn,
    Gnb,
    Nbm,
}

impl BaseClassifier {
    pub const ALL: [BaseClassifier; 3] = [BaseClassifier::Knn, BaseClassifier::Gnb, BaseClassifier::Nbm];

    pub fn tag(self) -> &'static str {
        match self {
            BaseClassifier::Knn => "KNN",
            BaseClassifier::Gnb => "GNB",
            BaseClassifier::Nbm => "NBM",
        }
    }
}

impl fmt::Display for BaseClassifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BaseClassifier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaseClassifier::ALL
            .into_iter()
            .find(|b| b.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown base classifier {s:?}")))
    }
}

/// Replace all-zero weights by B weights; returns whether that happened.
fn effective_weights(w: &[f64]) -> (Vec<f64>, bool) {
    if w.iter().all(|&v| v == 0.0) {
        (vec![1.0; w.len()], true)
    } else {
        (w.to_vec(), false)
    }
}

/// KNN over the concatenated channels with channel-weighted distance and
/// similarity-weighted votes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedKnn {
    pub rows: Vec<Vec<Vec<f64>>>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
    pub sigma: f64,
    pub k: usize,
}

impl WeightedKnn {
    pub fn fit(train: &FeatureSet, k: usize) -> Result<Self> {
        if k == 0 || k > train.len() {
            return Err(Error::Config(format!("K = {k} must lie in 1..={}", train.len())));
        }
        let flat: Vec<Vec<f64>> = train.rows.iter().map(|r| r.concat()).collect();
        Ok(Self {
            rows: train.rows.clone(),
            labels: train.labels.clone(),
            num_classes: train.num_classes,
            sigma: sigma_from_train(&flat)?,
            k,
        })
    }

    pub fn supports(&self, x: &[Vec<f64>], w: &[f64]) -> ClassSupports {
        let d2: Vec<f64> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .zip(w)
                    .map(|((a, b), wl)| wl * a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>())
                    .sum()
            })
            .collect();
        let neg: Vec<f64> = d2.iter().map(|v| -v).collect();
        let nearest = alpha_cut_top_k(&neg, self.k);
        let dmin = nearest.iter().map(|&n| d2[n]).fold(f64::INFINITY, f64::min);
        let denom = 2.0 * self.sigma * self.sigma;
        let mut raw = vec![0.0; self.num_classes];
        for n in nearest {
            raw[self.labels[n] - 1] += (-(d2[n] - dmin) / denom).exp();
        }
        ClassSupports::from_raw(raw)
    }
}

fn softmax_supports(mut logp: Vec<f64>) -> ClassSupports {
    let m = logp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return ClassSupports::uniform(logp.len());
    }
    logp.iter_mut().for_each(|v| *v = (*v - m).exp());
    ClassSupports::from_raw(logp)
}

fn class_priors(train: &FeatureSet) -> Vec<f64> {
    let mut counts = vec![0.0; train.num_classes];
    for &y in &train.labels {
        counts[y - 1] += 1.0;
    }
    counts.iter().map(|c| c / train.len() as f64).collect()
}

/// Gaussian naive Bayes; variances are smoothed by `1e-9 ×` the largest
/// attribute variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub log_prior: Vec<f64>,
    /// `[class][channel][attribute]`
    pub mean: Vec<Vec<Vec<f64>>>,
    pub var: Vec<Vec<Vec<f64>>>,
}

impl GaussianNb {
    pub fn fit(train: &FeatureSet) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Data("empty training set".into()));
        }
        let l = train.num_channels();
        let mut max_var: f64 = 0.0;
        let mut mean = Vec::new();
        let mut var = Vec::new();
        for j in 1..=train.num_classes {
            let members: Vec<&Vec<Vec<f64>>> = train
                .rows
                .iter()
                .zip(&train.labels)
                .filter(|(_, &y)| y == j)
                .map(|(r, _)| r)
                .collect();
            let n = members.len().max(1) as f64;
            let mj: Vec<Vec<f64>> = (0..l)
                .map(|c| {
                    (0..train.channel_dim(c))
                        .map(|a| members.iter().map(|r| r[c][a]).sum::<f64>() / n)
                        .collect()
                })
                .collect();
            let vj: Vec<Vec<f64>> = (0..l)
                .map(|c| {
                    (0..train.channel_dim(c))
                        .map(|a| members.iter().map(|r| (r[c][a] - mj[c][a]).powi(2)).sum::<f64>() / n)
                        .collect()
                })
                .collect();
            mean.push(mj);
            var.push(vj);
        }
        // global attribute variance for smoothing
        let all_n = train.len() as f64;
        for c in 0..l {
            for a in 0..train.channel_dim(c) {
                let m = train.rows.iter().map(|r| r[c][a]).sum::<f64>() / all_n;
                let v = train.rows.iter().map(|r| (r[c][a] - m).powi(2)).sum::<f64>() / all_n;
                max_var = max_var.max(v);
            }
        }
        let eps = (1e-9 * max_var).max(VARIANCE_FLOOR * 1e-3);
        for v in var.iter_mut().flatten().flatten() {
            *v += eps;
        }
        Ok(Self {
            log_prior: class_priors(train).iter().map(|p| p.ln()).collect(),
            mean,
            var,
        })
    }

    pub fn supports(&self, x: &[Vec<f64>], w: &[f64]) -> ClassSupports {
        let logp = (0..self.log_prior.len())
            .map(|j| {
                self.log_prior[j]
                    + x.iter()
                        .enumerate()
                        .map(|(c, xc)| {
                            w[c] * xc
                                .iter()
                                .enumerate()
                                .map(|(a, &v)| gaussian_log_pdf(v, self.mean[j][c][a], self.var[j][c][a]))
                                .sum::<f64>()
                        })
                        .sum::<f64>()
            })
            .collect();
        softmax_supports(logp)
    }
}

/// Naive Bayes with a 1-D Gaussian mixture per class and attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureNb {
    pub log_prior: Vec<f64>,
    /// Selected component count `[channel][attribute]`.
    pub components: Vec<Vec<usize>>,
    /// `[class][channel][attribute]`
    pub densities: Vec<Vec<Vec<Mixture1d>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixtureTuning {
    pub candidates: Vec<usize>,
    pub folds: usize,
    pub seed: u64,
}

impl Default for MixtureTuning {
    fn default() -> Self {
        Self {
            candidates: vec![1, 2, 3],
            folds: 4,
            seed: 0,
        }
    }
}

fn column(train: &FeatureSet, idx: &[usize], c: usize, a: usize, class: usize) -> Vec<f64> {
    idx.iter()
        .filter(|&&i| train.labels[i] == class)
        .map(|&i| train.rows[i][c][a])
        .collect()
}

fn fit_densities(
    train: &FeatureSet,
    idx: &[usize],
    c: usize,
    a: usize,
    m: usize,
    seed: u64,
) -> Vec<Mixture1d> {
    (1..=train.num_classes)
        .map(|j| {
            let col = column(train, idx, c, a, j);
            if col.is_empty() {
                Mixture1d {
                    weights: vec![1.0],
                    means: vec![0.0],
                    vars: vec![1.0],
                }
            } else {
                Mixture1d::fit(&col, m, seed::derive(seed, &[c as u64, a as u64, j as u64]))
            }
        })
        .collect()
}

impl MixtureNb {
    /// Fit, choosing each attribute's component count by the cross-validated
    /// BAC of a naive Bayes classifier that uses that attribute alone.
    pub fn fit(train: &FeatureSet, cfg: &MixtureTuning) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Data("empty training set".into()));
        }
        if cfg.candidates.is_empty() || cfg.candidates.contains(&0) {
            return Err(Error::Config("mixture component candidates must be positive".into()));
        }
        let log_prior: Vec<f64> = class_priors(train).iter().map(|p| p.ln()).collect();
        let all: Vec<usize> = (0..train.len()).collect();
        let assignment = if cfg.candidates.len() > 1 {
            Some(stratified_folds(&train.labels, cfg.folds, seed::derive(cfg.seed, &[0]))?)
        } else {
            None
        };
        let attrs: Vec<(usize, usize)> = (0..train.num_channels())
            .flat_map(|c| (0..train.channel_dim(c)).map(move |a| (c, a)))
            .collect();
        let chosen: Vec<usize> = attrs
            .par_iter()
            .map(|&(c, a)| {
                let Some(assignment) = &assignment else {
                    return cfg.candidates[0];
                };
                let mut best = (cfg.candidates[0], f64::NEG_INFINITY);
                for &m in &cfg.candidates {
                    let mut score = 0.0;
                    for f in 0..cfg.folds {
                        let (tr, te) = split(assignment, f);
                        let dens = fit_densities(train, &tr, c, a, m, cfg.seed);
                        let pred: Vec<usize> = te
                            .iter()
                            .map(|&i| {
                                let v = train.rows[i][c][a];
                                let logp: Vec<f64> = dens
                                    .iter()
                                    .zip(&log_prior)
                                    .map(|(d, p)| p + d.log_pdf(v))
                                    .collect();
                                softmax_supports(logp).label()
                            })
                            .collect();
                        let truth: Vec<usize> = te.iter().map(|&i| train.labels[i]).collect();
                        score += bac(&truth, &pred, train.num_classes);
                    }
                    if score > best.1 {
                        best = (m, score);
                    }
                }
                best.0
            })
            .collect();

        let fitted: Vec<Vec<Mixture1d>> = attrs
            .par_iter()
            .zip(&chosen)
            .map(|(&(c, a), &m)| fit_densities(train, &all, c, a, m, cfg.seed))
            .collect();
        let mut components: Vec<Vec<usize>> = (0..train.num_channels())
            .map(|c| vec![0; train.channel_dim(c)])
            .collect();
        let mut densities: Vec<Vec<Vec<Mixture1d>>> = (0..train.num_classes)
            .map(|_| (0..train.num_channels()).map(|_| Vec::new()).collect())
            .collect();
        for ((&(c, a), &m), per_class) in attrs.iter().zip(&chosen).zip(fitted) {
            components[c][a] = m;
            for (j, d) in per_class.into_iter().enumerate() {
                densities[j][c].push(d);
            }
        }
        Ok(Self {
            log_prior,
            components,
            densities,
        })
    }

    pub fn supports(&self, x: &[Vec<f64>], w: &[f64]) -> ClassSupports {
        let logp = (0..self.log_prior.len())
            .map(|j| {
                self.log_prior[j]
                    + x.iter()
                        .enumerate()
                        .map(|(c, xc)| {
                            w[c] * xc
                                .iter()
                                .enumerate()
                                .map(|(a, &v)| self.densities[j][c][a].log_pdf(v))
                                .sum::<f64>()
                        })
                        .sum::<f64>()
            })
            .collect();
        softmax_supports(logp)
    }
}

/// A trained baseline of any base type.
#[derive(Debug, Clone, PartialEq)]
pub enum BaselineModel {
    Knn(WeightedKnn),
    Gnb(GaussianNb),
    Nbm(MixtureNb),
}

impl BaselineModel {
    pub fn base(&self) -> BaseClassifier {
        match self {
            BaselineModel::Knn(_) => BaseClassifier::Knn,
            BaselineModel::Gnb(_) => BaseClassifier::Gnb,
            BaselineModel::Nbm(_) => BaseClassifier::Nbm,
        }
    }

    fn check(&self, x: &[Vec<f64>], w: &[f64]) -> Result<()> {
        let shape: Vec<usize> = match self {
            BaselineModel::Knn(m) => m.rows[0].iter().map(Vec::len).collect(),
            BaselineModel::Gnb(m) => m.mean[0].iter().map(Vec::len).collect(),
            BaselineModel::Nbm(m) => m.components.iter().map(Vec::len).collect(),
        };
        if x.len() != shape.len() || w.len() != shape.len() || x.iter().map(Vec::len).ne(shape.iter().copied()) {
            return Err(Error::Data("query shape differs from the training features".into()));
        }
        Ok(())
    }

    /// Predict with channel weights `w`.
    pub fn predict(&self, x: &[Vec<f64>], w: &[f64]) -> Result<Prediction> {
        self.check(x, w)?;
        let (w, reverted) = effective_weights(w);
        let supports = match self {
            BaselineModel::Knn(m) => m.supports(x, &w),
            BaselineModel::Gnb(m) => m.supports(x, &w),
            BaselineModel::Nbm(m) => m.supports(x, &w),
        };
        Ok(Prediction {
            label: supports.label(),
            supports,
            memberships: Vec::new(),
            reverted_weights: reverted,
        })
    }
}

/// K tuning for the weighted KNN baseline with B weights.
pub fn tune_k_knn(train: &FeatureSet, cfg: &super::KTuning) -> Result<super::KSelection> {
    super::tune_k(train, cfg, |tr, te, k| {
        let m = WeightedKnn::fit(tr, k)?;
        let ones = vec![1.0; tr.num_channels()];
        Ok(te.rows.iter().map(|x| m.supports(x, &ones).label()).collect())
    })
}

/// Baseline prediction for a weighting scheme, given each channel's
/// membership `r` and band coordinate `t`.
pub fn baseline_predict(
    model: &BaselineModel,
    weighting: Weighting,
    x: &[Vec<f64>],
    r: &[f64],
    t: &[f64],
) -> Result<Prediction> {
    let mut p = model.predict(x, &weighting.weights(r, t))?;
    p.memberships = r.to_vec();
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(points: &[(f64, usize)]) -> FeatureSet {
        FeatureSet::new(
            points.iter().map(|&(v, _)| vec![vec![v]]).collect(),
            points.iter().map(|&(_, y)| y).collect(),
            2,
        )
        .unwrap()
    }

    #[test]
    fn gnb_symmetric_midpoint() {
        // Unit variances, means ±1: equal posteriors at 0.
        let set = one_d(&[(-2.0, 1), (0.0, 1), (0.0, 2), (2.0, 2)]);
        let m = GaussianNb::fit(&set).unwrap();
        assert!((m.mean[0][0][0] + 1.0).abs() < 1e-15 && (m.var[0][0][0] - 1.0).abs() < 1e-6);
        let s = m.supports(&[vec![0.0]], &[1.0]);
        assert!((s.d[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn aw_with_unit_memberships_is_b() {
        let set = FeatureSet::new(
            vec![
                vec![vec![0.0], vec![1.0]],
                vec![vec![0.2], vec![1.3]],
                vec![vec![2.0], vec![0.1]],
                vec![vec![2.1], vec![0.0]],
            ],
            vec![1, 1, 2, 2],
            2,
        )
        .unwrap();
        let model = BaselineModel::Knn(WeightedKnn::fit(&set, 3).unwrap());
        let x = vec![vec![1.2], vec![0.7]];
        let ones = [1.0, 1.0];
        let b = baseline_predict(&model, Weighting::B, &x, &[0.3, 0.9], &[0.4, 0.9]).unwrap();
        let aw = baseline_predict(&model, Weighting::AW, &x, &ones, &ones).unwrap();
        assert_eq!(b.supports, aw.supports);
    }

    #[test]
    fn all_zero_weights_revert() {
        let set = one_d(&[(0.0, 1), (0.1, 1), (1.0, 2), (1.1, 2)]);
        let model = BaselineModel::Gnb(GaussianNb::fit(&set).unwrap());
        let p = baseline_predict(&model, Weighting::AWc, &[vec![0.05]], &[0.1], &[0.2]).unwrap();
        assert!(p.reverted_weights);
        assert_eq!(p.label, 1);
    }

    #[test]
    fn awc_uses_crisp_boundary() {
        assert_eq!(Weighting::AWc.weights(&[0.6, 0.6], &[0.45, 0.5]), vec![0.0, 1.0]);
    }

    #[test]
    fn nbm_picks_two_components_for_bimodal_class() {
        let mut pts = Vec::new();
        for i in 0..30 {
            let e = 0.01 * i as f64;
            pts.push((-3.0 + e, 1));
            pts.push((3.0 + e, 1));
            pts.push((-8.0 + 16.0 * i as f64 / 29.0, 2));
        }
        let set = one_d(&pts);
        let m = MixtureNb::fit(&set, &MixtureTuning::default()).unwrap();
        assert!(m.components[0][0] >= 2);
        let p = BaselineModel::Nbm(m).predict(&[vec![-2.9]], &[1.0]).unwrap();
        assert_eq!(p.label, 1);
    }
}
