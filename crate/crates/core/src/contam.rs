//! SNR-controlled contamination of individual channels.
//!
//! SNR is measured per channel against the mean squared amplitude of the
//! clean signal: `snr_db = 10 log10(P_clean / P_distortion)` where the
//! distortion is `noisy - clean`. Additive kinds are scaled so the realised
//! distortion power hits the target exactly; attenuation and clipping are
//! mapped onto the same scale through their distortion power.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index;
use rand::RngExt;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::SegmentDataset;
use crate::error::{Error, Result};
use crate::seed;

/// SNR levels used by the experiments, in dB.
pub const DEFAULT_SNR_GRID: [f64; 9] = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 10.0, 12.0];

/// Clipping is accepted when the achieved SNR is this close to the target.
pub const CLIPPING_TOLERANCE_DB: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Powerline,
    Attenuation,
    Gaussian,
    Clipping,
    Baseline,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 5] = [
        NoiseKind::Powerline,
        NoiseKind::Attenuation,
        NoiseKind::Gaussian,
        NoiseKind::Clipping,
        NoiseKind::Baseline,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            NoiseKind::Powerline => "powerline",
            NoiseKind::Attenuation => "attenuation",
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Clipping => "clipping",
            NoiseKind::Baseline => "baseline",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NoiseKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::Config(format!("unknown noise kind {s:?}")))
    }
}

/// Frequency ranges of the sinusoidal contaminants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    pub powerline_hz: (f64, f64),
    pub baseline_hz: (f64, f64),
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            powerline_hz: (48.0, 52.0),
            baseline_hz: (0.5, 1.5),
        }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        let (plo, phi) = self.powerline_hz;
        let (blo, bhi) = self.baseline_hz;
        if !(48.0..=52.0).contains(&plo) || !(48.0..=52.0).contains(&phi) || plo > phi {
            return Err(Error::Config(format!("powerline range {plo}..{phi} must lie in [48, 52] Hz")));
        }
        if !(0.5..=1.5).contains(&blo) || !(0.5..=1.5).contains(&bhi) || blo > bhi {
            return Err(Error::Config(format!("baseline range {blo}..{bhi} must lie in [0.5, 1.5] Hz")));
        }
        Ok(())
    }
}

/// Ground truth for one contaminated channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelContamination {
    pub kind: NoiseKind,
    pub target_snr_db: f64,
    pub achieved_snr_db: f64,
    /// Set when the target could not be reached (clipping below 0 dB).
    pub unreachable: bool,
}

pub fn signal_power(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

/// Distortion power that realises `snr_db` against the clean signal `x`.
pub fn noise_power_for_snr(x: &[f64], snr_db: f64) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::DegenerateSignal("empty signal".into()));
    }
    let ps = signal_power(x);
    if !ps.is_finite() {
        return Err(Error::Data("signal contains non-finite values".into()));
    }
    if ps == 0.0 {
        return Err(Error::DegenerateSignal("all-zero signal has undefined SNR".into()));
    }
    Ok(ps / 10f64.powf(snr_db / 10.0))
}

/// SNR of `noisy` against `clean` in dB; `+inf` when they are identical.
pub fn achieved_snr_db(clean: &[f64], noisy: &[f64]) -> f64 {
    let pd = clean
        .iter()
        .zip(noisy)
        .map(|(c, n)| (n - c) * (n - c))
        .sum::<f64>()
        / clean.len() as f64;
    10.0 * (signal_power(clean) / pd).log10()
}

fn add_scaled(x: &[f64], component: &[f64], target_power: f64) -> Vec<f64> {
    let p = signal_power(component);
    let scale = if p > 0.0 { (target_power / p).sqrt() } else { 0.0 };
    x.iter().zip(component).map(|(v, c)| v + scale * c).collect()
}

fn inject_sinusoid(x: &[f64], snr_db: f64, fs_hz: f64, band: (f64, f64), seed: u64) -> Result<Vec<f64>> {
    if !(fs_hz > 2.0 * band.1) {
        return Err(Error::Config(format!(
            "sampling rate {fs_hz} Hz cannot represent a {} Hz contaminant",
            band.1
        )));
    }
    let pn = noise_power_for_snr(x, snr_db)?;
    let mut rng = seed::rng(seed, &[]);
    let f = if band.1 > band.0 { rng.random_range(band.0..band.1) } else { band.0 };
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let wave: Vec<f64> = (0..x.len())
        .map(|t| (std::f64::consts::TAU * f * t as f64 / fs_hz + phase).sin())
        .collect();
    Ok(add_scaled(x, &wave, pn))
}

/// Add mains interference with frequency in [48, 52] Hz.
pub fn inject_powerline(x: &[f64], snr_db: f64, fs_hz: f64, seed: u64) -> Result<Vec<f64>> {
    inject_sinusoid(x, snr_db, fs_hz, NoiseParams::default().powerline_hz, seed)
}

/// Add a slow baseline drift with frequency in [0.5, 1.5] Hz.
pub fn inject_baseline(x: &[f64], snr_db: f64, fs_hz: f64, seed: u64) -> Result<Vec<f64>> {
    inject_sinusoid(x, snr_db, fs_hz, NoiseParams::default().baseline_hz, seed)
}

/// Add white Gaussian noise. The realisation is rescaled so its mean square
/// equals the target noise power exactly.
pub fn inject_gaussian(x: &[f64], snr_db: f64, seed: u64) -> Result<Vec<f64>> {
    let pn = noise_power_for_snr(x, snr_db)?;
    let mut rng = seed::rng(seed, &[]);
    let w: Vec<f64> = (0..x.len()).map(|_| rng.sample(StandardNormal)).collect();
    Ok(add_scaled(x, &w, pn))
}

/// Gain applied by [`inject_attenuation`].
pub fn attenuation_gain(snr_db: f64) -> f64 {
    1.0 - 10f64.powf(-snr_db / 20.0)
}

/// Scale the signal down as if the electrode lost contact.
pub fn inject_attenuation(x: &[f64], snr_db: f64) -> Vec<f64> {
    let g = attenuation_gain(snr_db);
    x.iter().map(|v| g * v).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClipOutcome {
    pub signal: Vec<f64>,
    pub threshold: f64,
    pub achieved_snr_db: f64,
    pub unreachable: bool,
}

fn clip_distortion(x: &[f64], c: f64) -> f64 {
    x.iter()
        .map(|v| {
            let e = (v.abs() - c).max(0.0);
            e * e
        })
        .sum::<f64>()
        / x.len() as f64
}

/// Symmetric hard clipping at the level whose distortion power matches the
/// target SNR, found by bisection.
pub fn inject_clipping(x: &[f64], snr_db: f64) -> Result<ClipOutcome> {
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if x.is_empty() || lo == hi {
        return Err(Error::DegenerateSignal("clipping needs a non-constant signal".into()));
    }
    let target = noise_power_for_snr(x, snr_db)?;
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    // distortion(c) decreases monotonically from P_s at c = 0 to 0 at c = peak.
    let (mut a, mut b) = (0.0, peak);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if clip_distortion(x, mid) > target {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= f64::EPSILON * peak {
            break;
        }
    }
    let c = if (clip_distortion(x, a) - target).abs() < (clip_distortion(x, b) - target).abs() {
        a
    } else {
        b
    };
    let signal: Vec<f64> = x.iter().map(|v| v.clamp(-c, c)).collect();
    let achieved = achieved_snr_db(x, &signal);
    Ok(ClipOutcome {
        unreachable: !((achieved - snr_db).abs() <= CLIPPING_TOLERANCE_DB),
        signal,
        threshold: c,
        achieved_snr_db: achieved,
    })
}

/// Apply one contaminant and report the achieved SNR.
pub fn inject(
    kind: NoiseKind,
    params: &NoiseParams,
    x: &[f64],
    snr_db: f64,
    fs_hz: f64,
    seed: u64,
) -> Result<(Vec<f64>, ChannelContamination)> {
    // Rejects zero-power signals for every kind, including attenuation.
    noise_power_for_snr(x, snr_db)?;
    let mut unreachable = false;
    let out = match kind {
        NoiseKind::Powerline => inject_sinusoid(x, snr_db, fs_hz, params.powerline_hz, seed)?,
        NoiseKind::Baseline => inject_sinusoid(x, snr_db, fs_hz, params.baseline_hz, seed)?,
        NoiseKind::Gaussian => inject_gaussian(x, snr_db, seed)?,
        NoiseKind::Attenuation => inject_attenuation(x, snr_db),
        NoiseKind::Clipping => {
            let o = inject_clipping(x, snr_db)?;
            unreachable = o.unreachable;
            o.signal
        }
    };
    let record = ChannelContamination {
        kind,
        target_snr_db: snr_db,
        achieved_snr_db: achieved_snr_db(x, &out),
        unreachable,
    };
    Ok((out, record))
}

/// How a test set is contaminated.
///
/// Channel choice and noise kinds depend only on `seed` and the segment
/// position, never on `snr_db`, so the same plan at different SNR levels
/// corrupts the same channels with the same kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationPlan {
    pub snr_db: f64,
    pub seed: u64,
    pub kinds: Vec<NoiseKind>,
    pub params: NoiseParams,
}

impl ContaminationPlan {
    pub fn new(snr_db: f64, seed: u64) -> Self {
        Self {
            snr_db,
            seed,
            kinds: NoiseKind::ALL.to_vec(),
            params: NoiseParams::default(),
        }
    }

    pub fn at_snr(&self, snr_db: f64) -> Self {
        Self {
            snr_db,
            ..self.clone()
        }
    }

    pub fn in_default_grid(&self) -> bool {
        DEFAULT_SNR_GRID.contains(&self.snr_db)
    }

    /// Channels and kinds drawn for segment `position` of an `L`-channel set.
    pub fn draw_channels(&self, position: usize, num_channels: usize) -> Vec<(usize, NoiseKind)> {
        let mut rng = seed::rng(self.seed, &[position as u64, 0]);
        let k = rng.random_range(1..num_channels);
        let mut chosen = index::sample(&mut rng, num_channels, k).into_vec();
        chosen.sort_unstable();
        chosen
            .into_iter()
            .map(|l| (l, self.kinds[rng.random_range(0..self.kinds.len())]))
            .collect()
    }
}

/// Per-segment ground truth: `masks[segment][channel]`.
pub type ContaminationMasks = Vec<Vec<Option<ChannelContamination>>>;

/// Contaminate between 1 and L-1 channels of every segment. The input is
/// left untouched; untouched channels are copied bit for bit.
pub fn contaminate_dataset(
    ds: &SegmentDataset,
    plan: &ContaminationPlan,
) -> Result<(SegmentDataset, ContaminationMasks)> {
    let l = ds.num_channels();
    if l < 2 {
        return Err(Error::Config(format!(
            "contamination needs at least 2 channels so one stays clean, got {l}"
        )));
    }
    if plan.kinds.is_empty() {
        return Err(Error::Config("contamination plan has no noise kinds".into()));
    }
    plan.params.validate()?;
    let fs = ds.sampling_rate_hz();
    let segments = ds
        .segments()
        .par_iter()
        .enumerate()
        .map(|(pos, seg)| {
            let mut seg = seg.clone();
            let mut mask = vec![None; l];
            for (ch, kind) in plan.draw_channels(pos, l) {
                let s = seed::derive(plan.seed, &[pos as u64, 1, ch as u64]);
                let (noisy, rec) = inject(kind, &plan.params, &seg.channels[ch], plan.snr_db, fs, s)
                    .map_err(|e| Error::Data(format!("segment {pos}, channel {ch}: {e}")))?;
                seg.channels[ch] = noisy;
                mask[ch] = Some(rec);
            }
            seg.contamination = Some(mask);
            Ok(seg)
        })
        .collect::<Result<Vec<_>>>()?;
    let masks = segments
        .iter()
        .map(|s| s.contamination.clone().unwrap_or_default())
        .collect();
    Ok((ds.with_segments(segments), masks))
}

/// Write the mask sidecar: one row per contaminated channel.
pub fn write_mask_sidecar(path: &Path, masks: &ContaminationMasks) -> Result<()> {
    let mut out = String::from("segment_id,channel,noise_kind,target_snr_db,achieved_snr_db\n");
    for (id, mask) in masks.iter().enumerate() {
        for (ch, rec) in mask.iter().enumerate() {
            if let Some(r) = rec {
                out.push_str(&format!(
                    "{id},{ch},{},{},{}\n",
                    r.kind, r.target_snr_db, r.achieved_snr_db
                ));
            }
        }
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic, SyntheticSpec};

    fn tone(n: usize) -> Vec<f64> {
        // unit power
        (0..n)
            .map(|t| std::f64::consts::SQRT_2 * (std::f64::consts::TAU * 37.0 * t as f64 / 1000.0).sin())
            .collect()
    }

    #[test]
    fn noise_power_definition() {
        let x = vec![1.0; 100];
        assert_eq!(noise_power_for_snr(&x, 0.0).unwrap(), 1.0);
        assert!((noise_power_for_snr(&x, 10.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(matches!(noise_power_for_snr(&[0.0; 10], 0.0), Err(Error::DegenerateSignal(_))));
    }

    #[test]
    fn powerline_power_and_determinism() {
        let x = tone(1000);
        let y = inject_powerline(&x, 0.0, 1000.0, 3).unwrap();
        let added: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
        assert!((signal_power(&added) - signal_power(&x)).abs() < 0.02);
        assert_eq!(y, inject_powerline(&x, 0.0, 1000.0, 3).unwrap());
        let quiet = inject_powerline(&x, 60.0, 1000.0, 3).unwrap();
        let d: Vec<f64> = quiet.iter().zip(&x).map(|(a, b)| a - b).collect();
        assert!(signal_power(&d) <= 1e-6 * signal_power(&x) * (1.0 + 1e-9));
    }

    #[test]
    fn powerline_rejects_low_rate() {
        assert!(matches!(inject_powerline(&tone(100), 0.0, 100.0, 1), Err(Error::Config(_))));
    }

    #[test]
    fn gaussian_power_match() {
        let x = tone(2000);
        let y = inject_gaussian(&x, 3.0, 11).unwrap();
        let added: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
        let target = noise_power_for_snr(&x, 3.0).unwrap();
        assert!((signal_power(&added) - target).abs() < 0.05);
        assert_eq!(y, inject_gaussian(&x, 3.0, 11).unwrap());
    }

    #[test]
    fn baseline_power_match() {
        let x = tone(500);
        let y = inject_baseline(&x, 6.0, 1000.0, 5).unwrap();
        assert!((achieved_snr_db(&x, &y) - 6.0).abs() < 1e-9);
    }

    #[test]
    fn attenuation_gain_values() {
        assert_eq!(attenuation_gain(0.0), 0.0);
        assert!((attenuation_gain(20.0) - 0.9).abs() < 1e-15);
        assert!(inject_attenuation(&[1.0, -2.0], 0.0).iter().all(|v| *v == 0.0));
        assert!((attenuation_gain(300.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clipping_noop_and_monotone() {
        let x = tone(1000);
        let none = inject_clipping(&x, f64::INFINITY).unwrap();
        assert_eq!(none.threshold, x.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        assert_eq!(none.signal, x);
        let mut last = 0.0;
        for snr in [0.0, 3.0, 6.0, 12.0] {
            let o = inject_clipping(&x, snr).unwrap();
            assert!((o.achieved_snr_db - snr).abs() <= CLIPPING_TOLERANCE_DB, "{snr}: {}", o.achieved_snr_db);
            assert!(o.threshold >= last);
            last = o.threshold;
        }
        assert!(matches!(inject_clipping(&[1.0; 10], 0.0), Err(Error::DegenerateSignal(_))));
    }

    #[test]
    fn clipping_below_zero_db_is_flagged() {
        let o = inject_clipping(&tone(200), -3.0).unwrap();
        assert!(o.unreachable);
        assert!(o.signal.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn dataset_masks_cover_one_to_l_minus_one() {
        let ds = generate_synthetic(&SyntheticSpec::benchmark(2, 8, 10, 1)).unwrap();
        let plan = ContaminationPlan::new(0.0, 99);
        let (noisy, masks) = contaminate_dataset(&ds, &plan).unwrap();
        for (seg, (orig, mask)) in noisy.segments().iter().zip(ds.segments().iter().zip(&masks)) {
            let k = mask.iter().filter(|m| m.is_some()).count();
            assert!((1..=7).contains(&k));
            for (l, m) in mask.iter().enumerate() {
                if m.is_none() {
                    assert_eq!(seg.channels[l], orig.channels[l]);
                }
            }
        }
        let (again, masks2) = contaminate_dataset(&ds, &plan).unwrap();
        assert_eq!(noisy, again);
        assert_eq!(masks, masks2);

        let (loud, masks12) = contaminate_dataset(&ds, &plan.at_snr(12.0)).unwrap();
        let kinds = |m: &ContaminationMasks| -> Vec<Vec<Option<NoiseKind>>> {
            m.iter().map(|s| s.iter().map(|c| c.map(|c| c.kind)).collect()).collect()
        };
        assert_eq!(kinds(&masks), kinds(&masks12));
        assert_ne!(loud, noisy);
    }

    #[test]
    fn single_channel_dataset_rejected() {
        let ds = generate_synthetic(&SyntheticSpec::benchmark(2, 1, 10, 1)).unwrap();
        assert!(matches!(
            contaminate_dataset(&ds, &ContaminationPlan::new(0.0, 1)),
            Err(Error::Config(_))
        ));
    }
}
