//! Repeated cross-validated comparison of classifiers on contaminated test
//! folds.
//!
//! Every (subject, repeat, fold) cell trains all methods on the clean
//! training part, then contaminates the test part once per SNR level and
//! scores every method on it. Channel choice and noise kinds of a cell are
//! shared across SNR levels, so rows of the rank tables differ only in the
//! amount of noise.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::baseline::{baseline_predict, tune_k_knn, GaussianNb, MixtureNb, MixtureTuning, WeightedKnn};
use crate::classify::{tune_k_fknn, BaseClassifier, BaselineModel, FknnEnsemble, KTuning, Prediction, Weighting};
use crate::contam::{contaminate_dataset, ContaminationPlan, DEFAULT_SNR_GRID};
use crate::dataset::SegmentDataset;
use crate::error::{Error, Result};
use crate::eval::folds::make_folds;
use crate::eval::metrics::{bac, kappa, micro_f1};
use crate::eval::stats::{average_ranks, holm_adjust, wilcoxon_signed_rank};
use crate::features::{extract_dataset, FeatureSet, Standardizer, WaveletSpec};
use crate::fuzzy::{membership, normalize_score, MembershipKind, MembershipSpec, DEFAULT_STEEPNESS};
use crate::occ::{fit_channel_detectors, ChannelDetector, DetectorConfig, NuTuning, DEFAULT_NU_GRID};
use crate::seed;

/// Method identifiers reserved for reference ensembles that are not built here.
pub const RESERVED_METHODS: [&str; 2] = ["do", "doa"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MethodKind {
    Baseline { weighting: Weighting, base: BaseClassifier },
    Fknn { membership: MembershipKind },
}

/// A named method taking part in an experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Method {
    pub id: String,
    pub kind: MethodKind,
}

impl Method {
    pub fn baseline(weighting: Weighting, base: BaseClassifier, id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: MethodKind::Baseline { weighting, base },
        }
    }

    pub fn fknn(membership: MembershipKind, id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: MethodKind::Fknn { membership },
        }
    }

    /// Parse `B|AW|AWc[-KNN|-GNB|-NBM]`, `FKNN`, `FKNNc` or `FKNN-<kind>`.
    /// `FKNN` alone uses `default_kind`.
    pub fn parse(id: &str, default_kind: MembershipKind) -> Result<Self> {
        let lower = id.to_ascii_lowercase();
        if RESERVED_METHODS.contains(&lower.as_str()) {
            return Err(Error::NotImplemented(format!("method {id}")));
        }
        let (head, tail) = match id.split_once('-') {
            Some((h, t)) => (h, Some(t)),
            None => (id, None),
        };
        let weighting = match head {
            "B" => Some(Weighting::B),
            "AW" => Some(Weighting::AW),
            "AWc" => Some(Weighting::AWc),
            _ => None,
        };
        if let Some(weighting) = weighting {
            let base = tail.map_or(Ok(BaseClassifier::Knn), BaseClassifier::from_str)?;
            return Ok(Self::baseline(weighting, base, id));
        }
        match (head, tail) {
            ("FKNN", None) => Ok(Self::fknn(default_kind, id)),
            ("FKNNc", None) => Ok(Self::fknn(MembershipKind::Cr, id)),
            ("FKNN", Some(kind)) => Ok(Self::fknn(kind.parse()?, id)),
            _ => Err(Error::Config(format!("unknown method id {id:?}"))),
        }
    }

    /// Membership kind that shapes this method's predictions, if any.
    pub fn membership_kind(&self, default_kind: MembershipKind) -> Option<MembershipKind> {
        match self.kind {
            MethodKind::Fknn { membership } => Some(membership),
            MethodKind::Baseline {
                weighting: Weighting::AW,
                ..
            } => Some(default_kind),
            MethodKind::Baseline {
                weighting: Weighting::AWc,
                ..
            } => Some(MembershipKind::Cr),
            MethodKind::Baseline { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentName {
    /// Weighting schemes over KNN and naive Bayes bases.
    Exp1,
    /// Membership shapes of the fuzzy ensemble.
    Exp2,
    /// Fuzzy ensemble against the weighting baselines.
    Exp3,
}

impl ExperimentName {
    pub fn tag(self) -> &'static str {
        match self {
            ExperimentName::Exp1 => "exp1",
            ExperimentName::Exp2 => "exp2",
            ExperimentName::Exp3 => "exp3",
        }
    }

    /// Fixed method roster.
    pub fn roster(self, fknn_kind: MembershipKind) -> Vec<Method> {
        match self {
            ExperimentName::Exp1 => BaseClassifier::ALL
                .into_iter()
                .flat_map(|base| {
                    Weighting::ALL
                        .into_iter()
                        .map(move |w| Method::baseline(w, base, format!("{w}-{base}")))
                })
                .collect(),
            ExperimentName::Exp2 => MembershipKind::ALL
                .into_iter()
                .map(|k| Method::fknn(k, format!("FKNN-{k}")))
                .collect(),
            ExperimentName::Exp3 => vec![
                Method::baseline(Weighting::B, BaseClassifier::Knn, "B"),
                Method::baseline(Weighting::AW, BaseClassifier::Knn, "AW"),
                Method::baseline(Weighting::AWc, BaseClassifier::Knn, "AWc"),
                Method::fknn(fknn_kind, "FKNN"),
                Method::fknn(MembershipKind::Cr, "FKNNc"),
            ],
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp1" => Ok(ExperimentName::Exp1),
            "exp2" => Ok(ExperimentName::Exp2),
            "exp3" => Ok(ExperimentName::Exp3),
            _ => Err(Error::Config(format!("unknown experiment {s:?} (expected exp1|exp2|exp3)"))),
        }
    }
}

/// How subjects enter the rank and test statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubjectMode {
    /// Every (subject, repeat, fold) cell is one case.
    Pool,
    /// Fold scores are averaged per subject; every subject is one case.
    PerSubject,
}

/// Tunable settings of a run. Every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSettings {
    pub snr_grid: Vec<f64>,
    pub folds: usize,
    pub repeats: usize,
    pub tuning_folds: usize,
    pub nu_grid: Vec<f64>,
    pub k_grid: Vec<usize>,
    pub mixture_components: Vec<usize>,
    /// Membership shape of `FKNN` and of the `AW` weights.
    pub fknn_kind: MembershipKind,
    pub steepness: f64,
    pub wavelet_levels: usize,
    /// Z-score features per channel with training statistics.
    pub standardize: bool,
    pub alpha: f64,
    pub subject_mode: SubjectMode,
    pub dump_predictions: bool,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        Self {
            snr_grid: DEFAULT_SNR_GRID.to_vec(),
            folds: 10,
            repeats: 4,
            tuning_folds: 4,
            nu_grid: DEFAULT_NU_GRID.to_vec(),
            k_grid: crate::classify::DEFAULT_K_GRID.to_vec(),
            mixture_components: vec![1, 2, 3],
            fknn_kind: MembershipKind::Nt,
            steepness: DEFAULT_STEEPNESS,
            wavelet_levels: 3,
            standardize: false,
            alpha: 0.05,
            subject_mode: SubjectMode::Pool,
            dump_predictions: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: Option<ExperimentName>,
    pub methods: Vec<Method>,
    pub settings: ExperimentSettings,
    pub seed: u64,
}

impl ExperimentConfig {
    /// One of the fixed experiments.
    pub fn named(name: ExperimentName, settings: ExperimentSettings, seed: u64) -> Self {
        Self {
            name: Some(name),
            methods: name.roster(settings.fknn_kind),
            settings,
            seed,
        }
    }

    /// Custom roster from method ids.
    pub fn custom(ids: &[String], settings: ExperimentSettings, seed: u64) -> Result<Self> {
        let methods = ids
            .iter()
            .map(|id| Method::parse(id, settings.fknn_kind))
            .collect::<Result<_>>()?;
        Ok(Self {
            name: None,
            methods,
            settings,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.settings;
        if self.methods.is_empty() {
            return Err(Error::Config("no methods configured".into()));
        }
        let mut ids: Vec<&str> = self.methods.iter().map(|m| m.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("duplicate method ids".into()));
        }
        if s.snr_grid.is_empty() || s.snr_grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("snr_grid must be a non-empty list of finite values".into()));
        }
        if s.folds < 2 || s.repeats < 1 || s.tuning_folds < 2 {
            return Err(Error::Config("need folds >= 2, repeats >= 1 and tuning_folds >= 2".into()));
        }
        if !(s.alpha > 0.0 && s.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", s.alpha)));
        }
        if s.wavelet_levels == 0 {
            return Err(Error::Config("wavelet_levels must be positive".into()));
        }
        MembershipSpec::with_steepness(s.fknn_kind, s.steepness)?;
        Ok(())
    }

    fn needs(&self, base: BaseClassifier) -> bool {
        self.methods
            .iter()
            .any(|m| matches!(m.kind, MethodKind::Baseline { base: b, .. } if b == base))
    }

    fn needs_fknn(&self) -> bool {
        self.methods.iter().any(|m| matches!(m.kind, MethodKind::Fknn { .. }))
    }
}

/// One scored (method, SNR, repeat, fold) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub subject: String,
    pub method: String,
    /// Membership kind tag, or `-` for methods that use none.
    pub kind: String,
    pub snr_db: f64,
    pub repeat: usize,
    pub fold: usize,
    pub bac: f64,
    pub kappa: f64,
    pub f1: f64,
}

/// One test-segment prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub subject: String,
    pub repeat: usize,
    pub fold: usize,
    pub snr_db: f64,
    pub segment_id: usize,
    pub true_label: usize,
    pub method: String,
    pub predicted_label: usize,
    pub supports: Vec<f64>,
    pub fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Bac,
    Kappa,
    F1,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Criterion::Bac, Criterion::Kappa, Criterion::F1];

    pub fn tag(self) -> &'static str {
        match self {
            Criterion::Bac => "bac",
            Criterion::Kappa => "kappa",
            Criterion::F1 => "f1",
        }
    }

    pub fn value(self, r: &MetricRecord) -> f64 {
        match self {
            Criterion::Bac => r.bac,
            Criterion::Kappa => r.kappa,
            Criterion::F1 => r.f1,
        }
    }
}

/// Ranks and pairwise tests at one SNR level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrComparison {
    pub snr_db: f64,
    pub cases: usize,
    pub mean_score: Vec<f64>,
    pub average_rank: Vec<f64>,
    /// Raw two-sided Wilcoxon p-values; `None` on the diagonal.
    pub p_value: Vec<Vec<Option<f64>>>,
    /// Holm-adjusted over all pairs at this SNR.
    pub p_holm: Vec<Vec<Option<f64>>>,
    /// `better[i][j]`: method i is significantly better than method j.
    pub better: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub criterion: Criterion,
    pub alpha: f64,
    pub subject_mode: SubjectMode,
    pub methods: Vec<String>,
    pub snr: Vec<SnrComparison>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub config: ExperimentConfig,
    pub subjects: Vec<String>,
    pub records: Vec<MetricRecord>,
    pub predictions: Vec<PredictionRow>,
    pub summaries: Vec<ComparisonSummary>,
}

/// Models trained on one clean training split.
struct CellModels {
    standardizer: Standardizer,
    detectors: Vec<ChannelDetector>,
    fknn: Option<FknnEnsemble>,
    baselines: BTreeMap<BaseClassifier, BaselineModel>,
}

fn train_cell(cfg: &ExperimentConfig, train: &FeatureSet, cell_seed: u64) -> Result<CellModels> {
    let s = &cfg.settings;
    let standardizer = if s.standardize {
        Standardizer::fit(train)
    } else {
        Standardizer::identity(&(0..train.num_channels()).map(|l| train.channel_dim(l)).collect::<Vec<_>>())
    };
    let train = standardizer.apply(train);

    let det_cfg = DetectorConfig {
        tuning: NuTuning {
            grid: s.nu_grid.clone(),
            folds: s.tuning_folds,
            seed: seed::derive(cell_seed, &[1]),
            ..NuTuning::default()
        },
        gamma: None,
    };
    let per_channel: Vec<Vec<Vec<f64>>> = (0..train.num_channels()).map(|l| train.channel(l)).collect();
    let detectors = fit_channel_detectors(&per_channel, &det_cfg)?;

    let k_cfg = |stream: u64| KTuning {
        grid: s.k_grid.clone(),
        folds: s.tuning_folds,
        seed: seed::derive(cell_seed, &[stream]),
    };
    let fknn = if cfg.needs_fknn() {
        let k = tune_k_fknn(&train, &k_cfg(2))?.k.min(train.len());
        Some(FknnEnsemble::fit(&train, k)?)
    } else {
        None
    };
    let mut baselines = BTreeMap::new();
    if cfg.needs(BaseClassifier::Knn) {
        let k = tune_k_knn(&train, &k_cfg(3))?.k.min(train.len());
        baselines.insert(BaseClassifier::Knn, BaselineModel::Knn(WeightedKnn::fit(&train, k)?));
    }
    if cfg.needs(BaseClassifier::Gnb) {
        baselines.insert(BaseClassifier::Gnb, BaselineModel::Gnb(GaussianNb::fit(&train)?));
    }
    if cfg.needs(BaseClassifier::Nbm) {
        let m_cfg = MixtureTuning {
            candidates: s.mixture_components.clone(),
            folds: s.tuning_folds,
            seed: seed::derive(cell_seed, &[4]),
        };
        baselines.insert(BaseClassifier::Nbm, BaselineModel::Nbm(MixtureNb::fit(&train, &m_cfg)?));
    }
    Ok(CellModels {
        standardizer,
        detectors,
        fknn,
        baselines,
    })
}

fn predict_method(
    method: &Method,
    models: &CellModels,
    x: &[Vec<f64>],
    t: &[f64],
    settings: &ExperimentSettings,
) -> Result<Prediction> {
    let shape = |kind: MembershipKind| -> Vec<f64> {
        let spec = MembershipSpec {
            kind,
            steepness: settings.steepness,
        };
        t.iter().map(|&t| membership(&spec, t)).collect()
    };
    match method.kind {
        MethodKind::Fknn { membership: kind } => {
            let ens = models
                .fknn
                .as_ref()
                .ok_or_else(|| Error::Config("fuzzy ensemble was not trained".into()))?;
            ens.predict_with_memberships(x, &shape(kind))
        }
        MethodKind::Baseline { weighting, base } => {
            let model = models
                .baselines
                .get(&base)
                .ok_or_else(|| Error::Config(format!("{base} baseline was not trained")))?;
            baseline_predict(model, weighting, x, &shape(settings.fknn_kind), t)
        }
    }
}

struct CellOutput {
    records: Vec<MetricRecord>,
    predictions: Vec<PredictionRow>,
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    cfg: &ExperimentConfig,
    subject_index: usize,
    subject: &str,
    ds: &SegmentDataset,
    features: &FeatureSet,
    wavelet: &WaveletSpec,
    train_idx: &[usize],
    test_idx: &[usize],
    repeat: usize,
    fold: usize,
) -> Result<CellOutput> {
    let s = &cfg.settings;
    let cell_seed = seed::derive(cfg.seed, &[subject_index as u64, repeat as u64, fold as u64]);
    let wrap = |method: &str| {
        let method = method.to_string();
        move |e: Error| Error::Cell {
            method: method.clone(),
            repeat,
            fold,
            source: Box::new(e),
        }
    };
    let models = train_cell(cfg, &features.subset(train_idx), cell_seed).map_err(wrap("training"))?;
    let test = ds.subset(test_idx);
    let truth = test.labels();
    let plan = ContaminationPlan::new(0.0, seed::derive(cell_seed, &[5]));

    let mut records = Vec::new();
    let mut predictions = Vec::new();
    for &snr in &s.snr_grid {
        let (noisy, _) = contaminate_dataset(&test, &plan.at_snr(snr)).map_err(wrap("contamination"))?;
        let feats = models
            .standardizer
            .apply(&extract_dataset(&noisy, wavelet).map_err(wrap("features"))?);
        let coords: Vec<Vec<f64>> = feats
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&models.detectors)
                    .map(|(x, det)| normalize_score(det.decision(x), &det.band))
                    .collect()
            })
            .collect();
        for method in &cfg.methods {
            let preds: Vec<Prediction> = feats
                .rows
                .iter()
                .zip(&coords)
                .map(|(x, t)| predict_method(method, &models, x, t, s))
                .collect::<Result<_>>()
                .map_err(wrap(&method.id))?;
            let labels: Vec<usize> = preds.iter().map(|p| p.label).collect();
            records.push(MetricRecord {
                subject: subject.to_string(),
                method: method.id.clone(),
                kind: method
                    .membership_kind(s.fknn_kind)
                    .map_or_else(|| "-".to_string(), |k| k.tag().to_string()),
                snr_db: snr,
                repeat,
                fold,
                bac: bac(&truth, &labels, ds.num_classes()),
                kappa: kappa(&truth, &labels),
                f1: micro_f1(&truth, &labels),
            });
            if s.dump_predictions {
                for ((p, &id), &y) in preds.iter().zip(test_idx).zip(&truth) {
                    predictions.push(PredictionRow {
                        subject: subject.to_string(),
                        repeat,
                        fold,
                        snr_db: snr,
                        segment_id: id,
                        true_label: y,
                        method: method.id.clone(),
                        predicted_label: p.label,
                        supports: p.supports.d.clone(),
                        fallback: p.fallback(),
                    });
                }
            }
        }
    }
    Ok(CellOutput { records, predictions })
}

/// Run every configured method over repeated stratified cross-validation of
/// each dataset (one dataset per subject).
pub fn run_experiment(datasets: &[SegmentDataset], cfg: &ExperimentConfig) -> Result<EvaluationReport> {
    cfg.validate()?;
    if datasets.is_empty() {
        return Err(Error::Config("no datasets supplied".into()));
    }
    let s = &cfg.settings;
    let wavelet = WaveletSpec {
        levels: s.wavelet_levels,
        ..WaveletSpec::default()
    };
    let subjects: Vec<String> = datasets
        .iter()
        .enumerate()
        .map(|(i, d)| {
            if d.subject_id().is_empty() {
                format!("s{i}")
            } else {
                d.subject_id().to_string()
            }
        })
        .collect();

    let mut outputs: Vec<CellOutput> = Vec::new();
    for (si, ds) in datasets.iter().enumerate() {
        if ds.num_channels() < 2 {
            return Err(Error::Config("experiments need at least 2 channels".into()));
        }
        let features = extract_dataset(ds, &wavelet)?;
        let plan = make_folds(&ds.labels(), s.folds, s.repeats, seed::derive(cfg.seed, &[si as u64, 0xF0]))?;
        let cells: Vec<(usize, usize)> = (0..s.repeats)
            .flat_map(|r| (0..s.folds).map(move |f| (r, f)))
            .collect();
        let mut out = cells
            .par_iter()
            .map(|&(r, f)| {
                run_cell(
                    cfg,
                    si,
                    &subjects[si],
                    ds,
                    &features,
                    &wavelet,
                    &plan.train_indices(r, f),
                    &plan.test_indices(r, f),
                    r,
                    f,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        outputs.append(&mut out);
    }

    let method_pos: BTreeMap<&str, usize> = cfg.methods.iter().enumerate().map(|(i, m)| (m.id.as_str(), i)).collect();
    let snr_pos = |v: f64| s.snr_grid.iter().position(|&g| g == v).unwrap_or(usize::MAX);
    let subject_pos: BTreeMap<&str, usize> = subjects.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut records: Vec<MetricRecord> = outputs.iter().flat_map(|o| o.records.iter().cloned()).collect();
    records.sort_by_key(|r| (subject_pos[r.subject.as_str()], method_pos[r.method.as_str()], snr_pos(r.snr_db), r.repeat, r.fold));
    let mut predictions: Vec<PredictionRow> = outputs.into_iter().flat_map(|o| o.predictions).collect();
    predictions.sort_by_key(|p| {
        (subject_pos[p.subject.as_str()], snr_pos(p.snr_db), p.repeat, p.fold, method_pos[p.method.as_str()], p.segment_id)
    });

    let summaries = Criterion::ALL
        .into_iter()
        .map(|c| summarize(&records, cfg, c))
        .collect();
    Ok(EvaluationReport {
        config: cfg.clone(),
        subjects,
        records,
        predictions,
        summaries,
    })
}

/// Average ranks and Holm-corrected pairwise Wilcoxon tests per SNR.
///
/// Depends only on the multiset of records, not on their order.
pub fn summarize(records: &[MetricRecord], cfg: &ExperimentConfig, criterion: Criterion) -> ComparisonSummary {
    let s = &cfg.settings;
    let methods: Vec<String> = cfg.methods.iter().map(|m| m.id.clone()).collect();
    let m = methods.len();
    let snr = s
        .snr_grid
        .iter()
        .map(|&snr| {
            // case key -> per-method (sum, count)
            let mut cases: BTreeMap<(String, usize, usize), Vec<(f64, usize)>> = BTreeMap::new();
            for r in records.iter().filter(|r| r.snr_db == snr) {
                let Some(j) = methods.iter().position(|id| *id == r.method) else {
                    continue;
                };
                let key = match s.subject_mode {
                    SubjectMode::Pool => (r.subject.clone(), r.repeat, r.fold),
                    SubjectMode::PerSubject => (r.subject.clone(), 0, 0),
                };
                let slot = &mut cases.entry(key).or_insert_with(|| vec![(0.0, 0); m])[j];
                slot.0 += criterion.value(r);
                slot.1 += 1;
            }
            let table: Vec<Vec<f64>> = cases
                .values()
                .filter(|row| row.iter().all(|c| c.1 > 0))
                .map(|row| row.iter().map(|(sum, n)| sum / *n as f64).collect())
                .collect();
            let n = table.len();
            let mean_score: Vec<f64> = (0..m)
                .map(|j| if n == 0 { f64::NAN } else { table.iter().map(|r| r[j]).sum::<f64>() / n as f64 })
                .collect();
            let average_rank = if n == 0 { vec![f64::NAN; m] } else { average_ranks(&table) };

            let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
            let raw: Vec<f64> = pairs
                .iter()
                .map(|&(i, j)| {
                    let a: Vec<f64> = table.iter().map(|r| r[i]).collect();
                    let b: Vec<f64> = table.iter().map(|r| r[j]).collect();
                    wilcoxon_signed_rank(&a, &b).p_value
                })
                .collect();
            let adj = holm_adjust(&raw);
            let mut p_value = vec![vec![None; m]; m];
            let mut p_holm = vec![vec![None; m]; m];
            let mut better = vec![vec![false; m]; m];
            for (k, &(i, j)) in pairs.iter().enumerate() {
                p_value[i][j] = Some(raw[k]);
                p_value[j][i] = Some(raw[k]);
                p_holm[i][j] = Some(adj[k]);
                p_holm[j][i] = Some(adj[k]);
                if adj[k] < s.alpha {
                    if average_rank[i] < average_rank[j] {
                        better[i][j] = true;
                    } else if average_rank[j] < average_rank[i] {
                        better[j][i] = true;
                    }
                }
            }
            SnrComparison {
                snr_db: snr,
                cases: n,
                mean_score,
                average_rank,
                p_value,
                p_holm,
                better,
            }
        })
        .collect();
    ComparisonSummary {
        criterion,
        alpha: s.alpha,
        subject_mode: s.subject_mode,
        methods,
        snr,
    }
}
