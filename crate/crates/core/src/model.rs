//! A trained end-to-end classifier: wavelet features, optional scaling,
//! channel detectors and the fuzzy KNN ensemble, with a directory format.
//!
//! ```text
//! <dir>/model.json       format tag, wavelet, scaling, membership, ensemble
//! <dir>/detector_<l>.txt one detector per channel (see occ::ChannelDetector)
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::{channel_memberships, tune_k_fknn, FknnEnsemble, KTuning, Prediction, DEFAULT_K_GRID};
use crate::dataset::{Segment, SegmentDataset};
use crate::error::{Error, Result};
use crate::features::{extract_dataset, extract_features, FeatureSet, Standardizer, WaveletSpec};
use crate::fuzzy::{normalize_score, MembershipKind, MembershipSpec, DEFAULT_STEEPNESS};
use crate::occ::{fit_channel_detectors, ChannelDetector, DetectorConfig, NuTuning, DEFAULT_NU_GRID};
use crate::seed;

const MODEL_FORMAT: &str = "fknn-model 1";
const MODEL_FILE: &str = "model.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub wavelet: WaveletSpec,
    pub standardize: bool,
    pub nu_grid: Vec<f64>,
    pub k_grid: Vec<usize>,
    pub tuning_folds: usize,
    pub membership: MembershipKind,
    pub steepness: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            wavelet: WaveletSpec::default(),
            standardize: false,
            nu_grid: DEFAULT_NU_GRID.to_vec(),
            k_grid: DEFAULT_K_GRID.to_vec(),
            tuning_folds: 4,
            membership: MembershipKind::Nt,
            steepness: DEFAULT_STEEPNESS,
        }
    }
}

/// Output of [`FknnModel::predict_segment`].
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPrediction {
    pub prediction: Prediction,
    /// Raw detector decision per channel.
    pub scores: Vec<f64>,
    /// Scores mapped into the unit band.
    pub normalized: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    wavelet: WaveletSpec,
    standardizer: Option<Standardizer>,
    membership: MembershipSpec,
    ensemble: FknnEnsemble,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FknnModel {
    pub wavelet: WaveletSpec,
    pub standardizer: Option<Standardizer>,
    pub membership: MembershipSpec,
    pub detectors: Vec<ChannelDetector>,
    pub ensemble: FknnEnsemble,
}

impl FknnModel {
    /// Train on raw segments.
    pub fn train(ds: &SegmentDataset, cfg: &TrainConfig, seed: u64) -> Result<Self> {
        let features = extract_dataset(ds, &cfg.wavelet)?;
        Self::train_features(&features, cfg, seed)
    }

    /// Train on features extracted with `cfg.wavelet`.
    pub fn train_features(features: &FeatureSet, cfg: &TrainConfig, seed: u64) -> Result<Self> {
        let membership = MembershipSpec::with_steepness(cfg.membership, cfg.steepness)?;
        let standardizer = cfg.standardize.then(|| Standardizer::fit(features));
        let train = match &standardizer {
            Some(s) => s.apply(features),
            None => features.clone(),
        };
        let per_channel: Vec<Vec<Vec<f64>>> = (0..train.num_channels()).map(|l| train.channel(l)).collect();
        let detectors = fit_channel_detectors(
            &per_channel,
            &DetectorConfig {
                tuning: NuTuning {
                    grid: cfg.nu_grid.clone(),
                    folds: cfg.tuning_folds,
                    seed: seed::derive(seed, &[1]),
                    ..NuTuning::default()
                },
                gamma: None,
            },
        )?;
        let k = tune_k_fknn(
            &train,
            &KTuning {
                grid: cfg.k_grid.clone(),
                folds: cfg.tuning_folds,
                seed: seed::derive(seed, &[2]),
            },
        )?
        .k
        .min(train.len());
        Ok(Self {
            wavelet: cfg.wavelet,
            standardizer,
            membership,
            detectors,
            ensemble: FknnEnsemble::fit(&train, k)?,
        })
    }

    pub fn num_channels(&self) -> usize {
        self.detectors.len()
    }

    pub fn num_classes(&self) -> usize {
        self.ensemble.num_classes
    }

    /// Model-space features of one segment.
    pub fn features(&self, seg: &Segment) -> Result<Vec<Vec<f64>>> {
        if seg.num_channels() != self.num_channels() {
            return Err(Error::Data(format!(
                "segment has {} channels, model expects {}",
                seg.num_channels(),
                self.num_channels()
            )));
        }
        let raw = extract_features(seg, &self.wavelet)?;
        Ok(match &self.standardizer {
            Some(s) => s.apply_row(&raw),
            None => raw,
        })
    }

    pub fn predict_features(&self, x: &[Vec<f64>]) -> Result<SegmentPrediction> {
        let r = channel_memberships(x, &self.detectors, &self.membership)?;
        let scores: Vec<f64> = x.iter().zip(&self.detectors).map(|(xl, d)| d.decision(xl)).collect();
        let normalized = scores
            .iter()
            .zip(&self.detectors)
            .map(|(&s, d)| normalize_score(s, &d.band))
            .collect();
        Ok(SegmentPrediction {
            prediction: self.ensemble.predict_with_memberships(x, &r)?,
            scores,
            normalized,
        })
    }

    pub fn predict_segment(&self, seg: &Segment) -> Result<SegmentPrediction> {
        self.predict_features(&self.features(seg)?)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            wavelet: self.wavelet,
            standardizer: self.standardizer.clone(),
            membership: self.membership,
            ensemble: self.ensemble.clone(),
        };
        let path = dir.join(MODEL_FILE);
        let text = serde_json::to_string(&file).map_err(|e| Error::Data(e.to_string()))?;
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        for (l, det) in self.detectors.iter().enumerate() {
            det.save(&dir.join(format!("detector_{l}.txt")))?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MODEL_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let file: ModelFile =
            serde_json::from_str(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        if file.format != MODEL_FORMAT {
            return Err(Error::Data(format!("{}: unsupported format {:?}", path.display(), file.format)));
        }
        let ens = &file.ensemble;
        let bad = |m: String| Err(Error::Data(format!("{}: {m}", path.display())));
        if ens.channels.is_empty() || ens.k == 0 || ens.num_classes < 2 {
            return bad("empty or degenerate ensemble".into());
        }
        for ch in &ens.channels {
            if ch.vectors.len() != ch.labels.len()
                || ens.k > ch.vectors.len()
                || ch.labels.iter().any(|&y| y == 0 || y > ens.num_classes)
                || !(ch.sigma > 0.0)
            {
                return bad("inconsistent channel training set".into());
            }
        }
        let detectors = (0..ens.channels.len())
            .map(|l| ChannelDetector::load(&dir.join(format!("detector_{l}.txt"))))
            .collect::<Result<Vec<_>>>()?;
        for (l, (det, ch)) in detectors.iter().zip(&ens.channels).enumerate() {
            if det.model.dim() != ch.dim() {
                return bad(format!("detector {l} dimension differs from its training set"));
            }
        }
        Ok(Self {
            wavelet: file.wavelet,
            standardizer: file.standardizer,
            membership: file.membership,
            detectors,
            ensemble: file.ensemble,
        })
    }
}
