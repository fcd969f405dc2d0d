//! ν one-class SVM contamination detectors, one per channel.
//!
//! The dual problem solved here is
//!
//! ```text
//! minimise   ½ Σ_i Σ_j α_i α_j K(x_i, x_j)
//! subject to Σ_i α_i = 1,   0 ≤ α_i ≤ 1 / (ν N)
//! ```
//!
//! with a Gaussian kernel `K(x, y) = exp(-γ ‖x − y‖²)`. The decision value is
//! `Σ α_i K(x, s_i) − ρ`; positive means the vector looks like clean training
//! data.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_NU_GRID: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
pub const MIN_TRAINING_POINTS: usize = 8;
type Points = Vec<Vec<f64>>;

const FORMAT_HEADER: &str = "fknn-ocsvm 1";

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `1 / (d · mean per-coordinate variance)`.
pub fn default_gamma(x: &[Vec<f64>]) -> f64 {
    let n = x.len() as f64;
    let d = x.first().map_or(0, Vec::len);
    let var: f64 = (0..d)
        .map(|a| {
            let m = x.iter().map(|r| r[a]).sum::<f64>() / n;
            x.iter().map(|r| (r[a] - m).powi(2)).sum::<f64>() / n
        })
        .sum::<f64>()
        / d as f64;
    if var > 0.0 && d > 0 {
        1.0 / (d as f64 * var)
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stopping threshold on the maximal KKT violation, measured on the
    /// `Σα = νN` scale conventional for this dual.
    pub tolerance: f64,
    pub max_pairs: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            max_pairs: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverStats {
    pub pairs: usize,
    pub converged: bool,
    pub final_violation: f64,
}

/// Trained one-class model.
#[derive(Debug, Clone, PartialEq)]
pub struct OneClassModel {
    support: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    rho: f64,
    gamma: f64,
    nu: f64,
    dim: usize,
}

impl OneClassModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.support
            .iter()
            .zip(&self.alpha)
            .map(|(s, a)| a * (-self.gamma * sq_dist(x, s)).exp())
            .sum::<f64>()
            - self.rho
    }

    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.support
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Full training output, including every dual coefficient.
#[derive(Debug, Clone)]
pub struct TrainedOcsvm {
    pub model: OneClassModel,
    /// Dual coefficient of every training point, in input order.
    pub alpha: Vec<f64>,
    pub upper_bound: f64,
    pub stats: SolverStats,
}

fn validate_training(x: &[Vec<f64>], nu: f64, gamma: f64) -> Result<usize> {
    if x.len() < MIN_TRAINING_POINTS {
        return Err(Error::Data(format!(
            "one-class training needs at least {MIN_TRAINING_POINTS} points, got {}",
            x.len()
        )));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::Config(format!("nu must lie in (0, 1], got {nu}")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Config(format!("gamma must be positive, got {gamma}")));
    }
    let d = x[0].len();
    if d == 0 || x.iter().any(|r| r.len() != d) {
        return Err(Error::Data("training vectors must share a non-zero dimension".into()));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Data("training vectors contain non-finite values".into()));
    }
    if x.iter().all(|r| r == &x[0]) {
        return Err(Error::Numerical("all training points are identical".into()));
    }
    Ok(d)
}

/// Train with the default solver settings.
pub fn train_ocsvm(x: &[Vec<f64>], nu: f64, gamma: f64) -> Result<OneClassModel> {
    train_ocsvm_with(x, nu, gamma, &SolverConfig::default()).map(|t| t.model)
}

/// Pairwise coordinate ascent on the dual, choosing the maximal-violation
/// pair at every step.
pub fn train_ocsvm_with(x: &[Vec<f64>], nu: f64, gamma: f64, cfg: &SolverConfig) -> Result<TrainedOcsvm> {
    let dim = validate_training(x, nu, gamma)?;
    let n = x.len();
    let c = 1.0 / (nu * n as f64);
    let scale = nu * n as f64;

    let mut kernel = vec![0.0; n * n];
    for i in 0..n {
        kernel[i * n + i] = 1.0;
        for j in 0..i {
            let k = (-gamma * sq_dist(&x[i], &x[j])).exp();
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }
    let k = |i: usize, j: usize| kernel[i * n + j];

    // Feasible start: the first floor(νN) coefficients at the bound, the
    // remainder on the next one.
    let mut alpha = vec![0.0; n];
    let full = ((nu * n as f64).floor() as usize).min(n);
    alpha[..full].fill(c);
    if full < n {
        alpha[full] = (1.0 - full as f64 * c).clamp(0.0, c);
    }
    let mut grad: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| k(i, j) * alpha[j]).sum())
        .collect();

    let mut pairs = 0;
    let mut violation;
    loop {
        // i: can grow and has the smallest gradient; j: can shrink and has the largest.
        let mut i_best = None;
        let mut j_best = None;
        for t in 0..n {
            if alpha[t] < c && i_best.is_none_or(|i: usize| grad[t] < grad[i]) {
                i_best = Some(t);
            }
            if alpha[t] > 0.0 && j_best.is_none_or(|j: usize| grad[t] > grad[j]) {
                j_best = Some(t);
            }
        }
        let (Some(i), Some(j)) = (i_best, j_best) else {
            violation = 0.0;
            break;
        };
        violation = scale * (grad[j] - grad[i]);
        if violation < cfg.tolerance {
            break;
        }
        if pairs >= cfg.max_pairs {
            log::warn!("one-class solver hit the cap of {} pairs (violation {violation:.3e})", cfg.max_pairs);
            break;
        }
        pairs += 1;

        let eta = (k(i, i) + k(j, j) - 2.0 * k(i, j)).max(1e-12);
        let room_i = c - alpha[i];
        let room_j = alpha[j];
        let step = ((grad[j] - grad[i]) / eta).min(room_i).min(room_j);
        if step == room_i {
            alpha[i] = c;
        } else {
            alpha[i] += step;
        }
        if step == room_j {
            alpha[j] = 0.0;
        } else {
            alpha[j] -= step;
        }
        for (t, g) in grad.iter_mut().enumerate() {
            *g += step * (k(t, i) - k(t, j));
        }
    }

    // ρ: mean gradient over free coefficients, else midpoint of the bounds.
    let free: Vec<usize> = (0..n).filter(|&t| alpha[t] > 0.0 && alpha[t] < c).collect();
    let rho = if free.is_empty() {
        let lb = (0..n).filter(|&t| alpha[t] >= c).map(|t| grad[t]).fold(f64::NEG_INFINITY, f64::max);
        let ub = (0..n).filter(|&t| alpha[t] <= 0.0).map(|t| grad[t]).fold(f64::INFINITY, f64::min);
        match (lb.is_finite(), ub.is_finite()) {
            (true, true) => 0.5 * (lb + ub),
            (true, false) => lb,
            (false, true) => ub,
            (false, false) => 0.0,
        }
    } else {
        free.iter().map(|&t| grad[t]).sum::<f64>() / free.len() as f64
    };

    let sv: Vec<usize> = (0..n).filter(|&t| alpha[t] > 0.0).collect();
    let model = OneClassModel {
        support: sv.iter().map(|&t| x[t].clone()).collect(),
        alpha: sv.iter().map(|&t| alpha[t]).collect(),
        rho,
        gamma,
        nu,
        dim,
    };
    Ok(TrainedOcsvm {
        model,
        alpha,
        upper_bound: c,
        stats: SolverStats {
            pairs,
            converged: violation < cfg.tolerance,
            final_violation: violation,
        },
    })
}

/// Points drawn uniformly from the bounding box of `x`, widened by 10% of
/// the range on every side.
pub fn sample_uniform_outliers(x: &[Vec<f64>], n: usize, seed: u64) -> Vec<Vec<f64>> {
    if n == 0 || x.is_empty() {
        return Vec::new();
    }
    let d = x[0].len();
    let bounds: Vec<(f64, f64)> = (0..d)
        .map(|a| {
            let (lo, hi) = x
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r[a]), hi.max(r[a])));
            let pad = 0.1 * (hi - lo);
            (lo - pad, hi + pad)
        })
        .collect();
    let mut rng = seed::rng(seed, &[]);
    (0..n)
        .map(|_| {
            bounds
                .iter()
                .map(|&(lo, hi)| if hi > lo { rng.random_range(lo..hi) } else { lo })
                .collect()
        })
        .collect()
}

/// Band used to turn raw decision values into a membership coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBand {
    pub scale: f64,
}

impl ScoreBand {
    /// Median absolute decision value over the training points.
    pub fn from_scores(scores: &[f64]) -> Self {
        let mut abs: Vec<f64> = scores.iter().map(|s| s.abs()).collect();
        abs.sort_by(f64::total_cmp);
        let median = match abs.len() {
            0 => 0.0,
            m if m % 2 == 1 => abs[m / 2],
            m => 0.5 * (abs[m / 2 - 1] + abs[m / 2]),
        };
        let scale = if median > 1e-12 {
            median
        } else {
            abs.last().copied().filter(|v| *v > 1e-12).unwrap_or(1.0)
        };
        Self { scale }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NuTuning {
    pub grid: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
    #[serde(skip)]
    pub solver: SolverConfig,
}

impl Default for NuTuning {
    fn default() -> Self {
        Self {
            grid: DEFAULT_NU_GRID.to_vec(),
            folds: 4,
            seed: 0,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NuSelection {
    pub nu: f64,
    /// Mean validation BAC per grid value; empty when the grid has one value.
    pub scores: Vec<(f64, f64)>,
    pub model: OneClassModel,
}

/// Select ν by cross-validated inlier/outlier balanced accuracy, then
/// retrain on all of `x`.
pub fn tune_nu(x: &[Vec<f64>], gamma: f64, cfg: &NuTuning) -> Result<NuSelection> {
    if cfg.grid.is_empty() {
        return Err(Error::Config("nu grid is empty".into()));
    }
    if cfg.grid.len() == 1 {
        let nu = cfg.grid[0];
        let model = train_ocsvm_with(x, nu, gamma, &cfg.solver)?.model;
        return Ok(NuSelection {
            nu,
            scores: Vec::new(),
            model,
        });
    }
    if cfg.folds < 2 || x.len() < cfg.folds {
        return Err(Error::Config(format!("cannot run {}-fold tuning on {} points", cfg.folds, x.len())));
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.shuffle(&mut seed::rng(cfg.seed, &[0]));
    let chunks: Vec<Vec<usize>> = (0..cfg.folds)
        .map(|f| order.iter().copied().skip(f).step_by(cfg.folds).collect())
        .collect();

    let splits: Vec<(Points, Points, Points)> = chunks
        .iter()
        .enumerate()
        .map(|(f, val_idx)| {
            let train: Vec<Vec<f64>> = chunks
                .iter()
                .enumerate()
                .filter(|(g, _)| *g != f)
                .flat_map(|(_, c)| c.iter().map(|&i| x[i].clone()))
                .collect();
            let val: Vec<Vec<f64>> = val_idx.iter().map(|&i| x[i].clone()).collect();
            let outliers = sample_uniform_outliers(&train, val.len(), seed::derive(cfg.seed, &[1, f as u64]));
            (train, val, outliers)
        })
        .collect();

    let cells: Vec<(usize, usize)> = (0..cfg.grid.len())
        .flat_map(|g| (0..cfg.folds).map(move |f| (g, f)))
        .collect();
    let bac: Vec<f64> = cells
        .par_iter()
        .map(|&(g, f)| {
            let (train, val, outliers) = &splits[f];
            let model = train_ocsvm_with(train, cfg.grid[g], gamma, &cfg.solver)?.model;
            let inlier = val.iter().filter(|v| model.decision(v) >= 0.0).count() as f64 / val.len() as f64;
            let outlier = outliers.iter().filter(|v| model.decision(v) < 0.0).count() as f64
                / outliers.len().max(1) as f64;
            Ok(0.5 * (inlier + outlier))
        })
        .collect::<Result<_>>()?;

    let scores: Vec<(f64, f64)> = cfg
        .grid
        .iter()
        .enumerate()
        .map(|(g, &nu)| (nu, bac[g * cfg.folds..(g + 1) * cfg.folds].iter().sum::<f64>() / cfg.folds as f64))
        .collect();
    let mut best = scores[0];
    for &(nu, s) in &scores[1..] {
        if s > best.1 || (s == best.1 && nu < best.0) {
            best = (nu, s);
        }
    }
    let model = train_ocsvm_with(x, best.0, gamma, &cfg.solver)?.model;
    Ok(NuSelection {
        nu: best.0,
        scores,
        model,
    })
}

/// A trained detector for one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDetector {
    pub model: OneClassModel,
    pub band: ScoreBand,
}

impl ChannelDetector {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.model.decision(x)
    }

    /// Serialize to the versioned text format.
    pub fn to_text(&self) -> String {
        let m = &self.model;
        let mut s = String::new();
        let _ = writeln!(s, "{FORMAT_HEADER}");
        let _ = writeln!(s, "nu {}", m.nu);
        let _ = writeln!(s, "gamma {}", m.gamma);
        let _ = writeln!(s, "rho {}", m.rho);
        let _ = writeln!(s, "band {}", self.band.scale);
        let _ = writeln!(s, "dim {}", m.dim);
        let _ = writeln!(s, "support {}", m.support.len());
        for (a, sv) in m.alpha.iter().zip(&m.support) {
            let vals: Vec<String> = std::iter::once(a).chain(sv).map(f64::to_string).collect();
            let _ = writeln!(s, "{}", vals.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Data(format!("detector file: {msg}"));
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(FORMAT_HEADER) {
            return Err(bad(format!("missing header {FORMAT_HEADER:?}")));
        }
        let mut field = |name: &str| -> Result<f64> {
            let line = lines.next().ok_or_else(|| bad(format!("missing {name}")))?;
            let (key, val) = line
                .split_once(' ')
                .ok_or_else(|| bad(format!("malformed line {line:?}")))?;
            if key != name {
                return Err(bad(format!("expected {name}, found {key}")));
            }
            val.trim().parse().map_err(|_| bad(format!("bad value for {name}")))
        };
        let nu = field("nu")?;
        let gamma = field("gamma")?;
        let rho = field("rho")?;
        let scale = field("band")?;
        let dim = field("dim")? as usize;
        let count = field("support")? as usize;
        let mut support = Vec::with_capacity(count);
        let mut alpha = Vec::with_capacity(count);
        for _ in 0..count {
            let line = lines.next().ok_or_else(|| bad("truncated support vectors".into()))?;
            let vals = line
                .split_whitespace()
                .map(|v| v.parse::<f64>().map_err(|_| bad(format!("bad number {v:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != dim + 1 {
                return Err(bad(format!("support vector with {} values, expected {}", vals.len() - 1, dim)));
            }
            alpha.push(vals[0]);
            support.push(vals[1..].to_vec());
        }
        if !(nu > 0.0 && nu <= 1.0) || !(gamma > 0.0) || !(scale > 0.0) || !rho.is_finite() {
            return Err(bad("parameters out of range".into()));
        }
        Ok(Self {
            model: OneClassModel {
                support,
                alpha,
                rho,
                gamma,
                nu,
                dim,
            },
            band: ScoreBand { scale },
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorConfig {
    pub tuning: NuTuning,
    /// Kernel width; `None` selects [`default_gamma`] per channel.
    pub gamma: Option<f64>,
}

/// Tune, train and calibrate one detector per channel. `per_channel[l]`
/// holds the (unlabeled) training vectors of channel `l`.
pub fn fit_channel_detectors(per_channel: &[Vec<Vec<f64>>], cfg: &DetectorConfig) -> Result<Vec<ChannelDetector>> {
    per_channel
        .par_iter()
        .enumerate()
        .map(|(l, x)| {
            let wrap = |e: Error| Error::Channel {
                channel: l,
                source: Box::new(e),
            };
            let gamma = cfg.gamma.unwrap_or_else(|| default_gamma(x));
            let tuning = NuTuning {
                seed: seed::derive(cfg.tuning.seed, &[l as u64]),
                ..cfg.tuning.clone()
            };
            let sel = tune_nu(x, gamma, &tuning).map_err(wrap)?;
            let scores: Vec<f64> = x.iter().map(|v| sel.model.decision(v)).collect();
            Ok(ChannelDetector {
                band: ScoreBand::from_scores(&scores),
                model: sel.model,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::StandardNormal;

    fn gaussian(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = seed::rng(seed, &[]);
        (0..n).map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect()).collect()
    }

    #[test]
    fn nu_property_on_gaussian() {
        let x = gaussian(200, 2, 1);
        let t = train_ocsvm_with(&x, 0.5, default_gamma(&x), &SolverConfig::default()).unwrap();
        let rejected = x.iter().filter(|v| t.model.decision(v) < 0.0).count() as f64 / 200.0;
        assert!((0.40..=0.55).contains(&rejected), "{rejected}");
        assert!((t.alpha.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(t.alpha.iter().all(|&a| (0.0..=t.upper_bound).contains(&a)));
        assert!(t.stats.converged);
    }

    #[test]
    fn nu_one_is_uniform() {
        let x = gaussian(30, 3, 2);
        let t = train_ocsvm_with(&x, 1.0, 0.5, &SolverConfig::default()).unwrap();
        assert!(t.alpha.iter().all(|&a| a == 1.0 / 30.0));
    }

    #[test]
    fn duplicates_converge() {
        let mut x = gaussian(20, 2, 3);
        x.extend(x.clone());
        let t = train_ocsvm_with(&x, 0.3, 1.0, &SolverConfig::default()).unwrap();
        assert!(t.stats.pairs < SolverConfig::default().max_pairs);
    }

    #[test]
    fn identical_points_fail() {
        let x = vec![vec![1.0, 2.0]; 10];
        assert!(matches!(train_ocsvm(&x, 0.5, 1.0), Err(Error::Numerical(_))));
    }

    #[test]
    fn far_point_scores_minus_rho() {
        let x = gaussian(50, 2, 4);
        let m = train_ocsvm(&x, 0.2, 1.0).unwrap();
        assert_eq!(m.decision(&[1e6, 1e6]), -m.rho());
    }

    #[test]
    fn bounded_support_vectors_are_not_inside() {
        let x = gaussian(100, 2, 5);
        let t = train_ocsvm_with(&x, 0.3, default_gamma(&x), &SolverConfig::default()).unwrap();
        for (xi, &a) in x.iter().zip(&t.alpha) {
            if a == t.upper_bound {
                // KKT: α at the box bound means f(x) ≤ 0 up to tolerance.
                assert!(t.model.decision(xi) <= 1e-3 / (0.3 * 100.0) + 1e-12);
            }
        }
    }

    #[test]
    fn outliers_inside_expanded_box() {
        let x = vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![0.5, 1.0]];
        let o = sample_uniform_outliers(&x, 500, 9);
        assert_eq!(o.len(), 500);
        assert!(o.iter().all(|p| (-0.1..=1.1).contains(&p[0]) && (-0.2..=2.2).contains(&p[1])));
        assert_eq!(o, sample_uniform_outliers(&x, 500, 9));
        assert!(sample_uniform_outliers(&x, 0, 9).is_empty());
    }

    #[test]
    fn blob_prefers_small_nu() {
        let x = gaussian(120, 4, 6);
        let cfg = NuTuning {
            seed: 3,
            ..NuTuning::default()
        };
        let sel = tune_nu(&x, default_gamma(&x), &cfg).unwrap();
        assert!(sel.nu <= 0.3, "{}", sel.nu);
        assert_eq!(sel.nu, tune_nu(&x, default_gamma(&x), &cfg).unwrap().nu);
    }

    #[test]
    fn single_value_grid_skips_search() {
        let x = gaussian(40, 2, 7);
        let cfg = NuTuning {
            grid: vec![0.7],
            ..NuTuning::default()
        };
        let sel = tune_nu(&x, 1.0, &cfg).unwrap();
        assert_eq!(sel.nu, 0.7);
        assert!(sel.scores.is_empty());
    }

    #[test]
    fn detector_text_round_trip() {
        let x = gaussian(40, 3, 8);
        let dets = fit_channel_detectors(&[x], &DetectorConfig::default()).unwrap();
        let text = dets[0].to_text();
        let back = ChannelDetector::from_text(&text).unwrap();
        assert_eq!(back, dets[0]);
        assert!(ChannelDetector::from_text("garbage").is_err());
        assert!(ChannelDetector::from_text(&text.replace("support", "suport")).is_err());
    }

    #[test]
    fn score_band_is_median_abs() {
        assert_eq!(ScoreBand::from_scores(&[-3.0, 1.0, 2.0]).scale, 2.0);
        assert_eq!(ScoreBand::from_scores(&[0.0, 0.0, 0.0]).scale, 1.0);
    }
}
