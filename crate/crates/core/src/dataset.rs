//! Multichannel recordings, labeled segments, on-disk ingestion and the
//! synthetic benchmark generator.
//!
//! On-disk layout of a dataset directory:
//!
//! ```text
//! manifest.toml        sampling_rate_hz, num_channels, window_ms
//! <class>_<trial>.csv  one row per time sample, one column per channel
//! index.csv            optional, written by `write_dataset`, ignored on load
//! ```
//!
//! Class labels are 1-based integers. Files are read in (class, trial) order
//! and every recording is cut into non-overlapping windows; the trailing
//! remainder of a recording is discarded.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::RngExt;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contam::ChannelContamination;
use crate::error::{Error, Result};
use crate::seed;

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const INDEX_FILE: &str = "index.csv";

/// Shortest window accepted by [`segment`], in samples.
pub const MIN_WINDOW_SAMPLES: usize = 8;

/// A raw multichannel recording. Stored channel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiChannelRecording {
    channels: Vec<Vec<f64>>,
    sampling_rate_hz: f64,
    subject_id: String,
    class_label: Option<usize>,
}

impl MultiChannelRecording {
    pub fn new(
        channels: Vec<Vec<f64>>,
        sampling_rate_hz: f64,
        subject_id: impl Into<String>,
        class_label: Option<usize>,
    ) -> Result<Self> {
        if channels.is_empty() || channels[0].is_empty() {
            return Err(Error::Data("recording needs at least one channel and one sample".into()));
        }
        if !(sampling_rate_hz > 0.0) || !sampling_rate_hz.is_finite() {
            return Err(Error::Data(format!("invalid sampling rate {sampling_rate_hz}")));
        }
        let n = channels[0].len();
        if channels.iter().any(|c| c.len() != n) {
            return Err(Error::Data("channels have different lengths".into()));
        }
        if channels.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Data("recording contains non-finite values".into()));
        }
        Ok(Self {
            channels,
            sampling_rate_hz,
            subject_id: subject_id.into(),
            class_label,
        })
    }

    /// Build from a row-major matrix (rows = time samples, columns = channels).
    pub fn from_rows(
        rows: &[Vec<f64>],
        sampling_rate_hz: f64,
        subject_id: impl Into<String>,
        class_label: Option<usize>,
    ) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Data("ragged rows".into()));
        }
        let channels = (0..width).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
        Self::new(channels, sampling_rate_hz, subject_id, class_label)
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn num_samples(&self) -> usize {
        self.channels[0].len()
    }

    pub fn sampling_rate_hz(&self) -> f64 {
        self.sampling_rate_hz
    }

    pub fn subject_id(&self) -> &str {
        &self.subject_id
    }

    pub fn class_label(&self) -> Option<usize> {
        self.class_label
    }
}

/// One fixed-length labeled window over all channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub channels: Vec<Vec<f64>>,
    pub label: usize,
    /// Ground truth written by contamination; `None` for clean data.
    pub contamination: Option<Vec<Option<ChannelContamination>>>,
}

impl Segment {
    pub fn new(channels: Vec<Vec<f64>>, label: usize) -> Self {
        Self {
            channels,
            label,
            contamination: None,
        }
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Boolean contamination mask (true = contaminated), if known.
    pub fn mask(&self) -> Option<Vec<bool>> {
        self.contamination
            .as_ref()
            .map(|m| m.iter().map(Option::is_some).collect())
    }
}

/// A labeled set of segments sharing channel count and sampling rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentDataset {
    segments: Vec<Segment>,
    num_classes: usize,
    num_channels: usize,
    sampling_rate_hz: f64,
    subject_id: String,
}

impl SegmentDataset {
    pub fn new(
        segments: Vec<Segment>,
        num_classes: usize,
        num_channels: usize,
        sampling_rate_hz: f64,
    ) -> Result<Self> {
        if num_classes == 0 || num_channels == 0 {
            return Err(Error::Data("dataset needs at least one class and one channel".into()));
        }
        if !(sampling_rate_hz > 0.0) {
            return Err(Error::Data(format!("invalid sampling rate {sampling_rate_hz}")));
        }
        let mut seen = vec![false; num_classes];
        for (i, s) in segments.iter().enumerate() {
            if s.label == 0 || s.label > num_classes {
                return Err(Error::Data(format!(
                    "segment {i} has label {} outside 1..={num_classes}",
                    s.label
                )));
            }
            if s.num_channels() != num_channels {
                return Err(Error::Data(format!(
                    "segment {i} has {} channels, expected {num_channels}",
                    s.num_channels()
                )));
            }
            let n = s.len();
            if s.channels.iter().any(|c| c.len() != n) {
                return Err(Error::Data(format!("segment {i} has channels of unequal length")));
            }
            seen[s.label - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|&p| !p) {
            return Err(Error::Data(format!("class {} has no segments", missing + 1)));
        }
        Ok(Self {
            segments,
            num_classes,
            num_channels,
            sampling_rate_hz,
            subject_id: String::new(),
        })
    }

    pub fn with_subject(mut self, subject_id: impl Into<String>) -> Self {
        self.subject_id = subject_id.into();
        self
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn num_channels(&self) -> usize {
        self.num_channels
    }

    pub fn sampling_rate_hz(&self) -> f64 {
        self.sampling_rate_hz
    }

    pub fn subject_id(&self) -> &str {
        &self.subject_id
    }

    pub fn labels(&self) -> Vec<usize> {
        self.segments.iter().map(|s| s.label).collect()
    }

    /// Same metadata, different segments. Used for fold subsets and
    /// contaminated copies; class coverage is not re-checked.
    pub(crate) fn with_segments(&self, segments: Vec<Segment>) -> Self {
        Self {
            segments,
            num_classes: self.num_classes,
            num_channels: self.num_channels,
            sampling_rate_hz: self.sampling_rate_hz,
            subject_id: self.subject_id.clone(),
        }
    }

    /// Subset by segment index, preserving the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        self.with_segments(indices.iter().map(|&i| self.segments[i].clone()).collect())
    }
}

/// Window length in samples for a duration in milliseconds.
pub fn window_samples(window_ms: f64, sampling_rate_hz: f64) -> usize {
    (window_ms * sampling_rate_hz / 1000.0).round() as usize
}

/// Cut a labeled recording into non-overlapping windows of `window_ms`.
pub fn segment(recording: &MultiChannelRecording, window_ms: f64) -> Result<Vec<Segment>> {
    if !(window_ms > 0.0) {
        return Err(Error::Config(format!("window_ms must be positive, got {window_ms}")));
    }
    let label = recording
        .class_label()
        .ok_or_else(|| Error::Data("cannot segment an unlabeled recording".into()))?;
    let win = window_samples(window_ms, recording.sampling_rate_hz());
    if win < MIN_WINDOW_SAMPLES {
        return Err(Error::Config(format!(
            "window of {win} samples is shorter than the minimum {MIN_WINDOW_SAMPLES}"
        )));
    }
    let n = recording.num_samples();
    if win > n {
        return Err(Error::Data(format!(
            "window of {win} samples is longer than the recording ({n} samples)"
        )));
    }
    Ok((0..n / win)
        .map(|w| {
            let channels = recording
                .channels()
                .iter()
                .map(|c| c[w * win..(w + 1) * win].to_vec())
                .collect();
            Segment::new(channels, label)
        })
        .collect())
}

/// Key-value manifest stored next to the CSV files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub sampling_rate_hz: f64,
    #[serde(default = "default_channels")]
    pub num_channels: usize,
    #[serde(default = "default_window_ms")]
    pub window_ms: f64,
}

fn default_channels() -> usize {
    8
}

fn default_window_ms() -> f64 {
    500.0
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        if !(self.sampling_rate_hz > 0.0) {
            return Err(Error::Config("manifest: sampling_rate_hz must be positive".into()));
        }
        if self.num_channels == 0 {
            return Err(Error::Config("manifest: num_channels must be at least 1".into()));
        }
        if !(self.window_ms > 0.0) {
            return Err(Error::Config("manifest: window_ms must be positive".into()));
        }
        Ok(())
    }
}

pub fn read_manifest(root: &Path) -> Result<DatasetManifest> {
    let path = root.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("cannot read manifest {}: {e}", path.display())))?;
    let manifest: DatasetManifest = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("invalid manifest {}: {e}", path.display())))?;
    manifest.validate()?;
    Ok(manifest)
}

fn parse_data_name(path: &Path) -> Option<(usize, usize)> {
    if path.extension()? != "csv" {
        return None;
    }
    let stem = path.file_stem()?.to_str()?;
    let (class, trial) = stem.split_once('_')?;
    Some((class.parse().ok()?, trial.parse().ok()?))
}

/// Read one `<class>_<trial>.csv` file as rows of the first `num_channels` columns.
fn read_signal_csv(path: &Path, num_channels: usize) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    let mut width = None;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::DataAt {
                path: path.to_path_buf(),
                line,
                msg: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let at = |msg: String| Error::DataAt {
            path: path.to_path_buf(),
            line,
            msg,
        };
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(at(format!("expected {w} columns, found {}", record.len())))
            }
            _ => {}
        }
        if record.len() < num_channels {
            return Err(at(format!(
                "row has {} columns but the manifest asks for {num_channels} channels",
                record.len()
            )));
        }
        let row = record
            .iter()
            .take(num_channels)
            .map(|cell| match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                Ok(v) => Err(at(format!("non-finite value {v}"))),
                Err(_) => Err(at(format!("cannot parse {cell:?} as a number"))),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Data(format!("{}: file has no rows", path.display())));
    }
    Ok(rows)
}

/// Read a single unlabeled segment stored as samples × channels CSV.
///
/// The returned segment carries label 0.
pub fn read_segment_csv(path: &Path, num_channels: usize) -> Result<Segment> {
    let rows = read_signal_csv(path, num_channels)?;
    let channels = (0..num_channels).map(|l| rows.iter().map(|r| r[l]).collect()).collect();
    Ok(Segment::new(channels, 0))
}

/// Load and segment every `<class>_<trial>.csv` under `root`.
pub fn load_dataset(root: &Path, manifest: &DatasetManifest) -> Result<SegmentDataset> {
    manifest.validate()?;
    let entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    let mut files: Vec<(usize, usize, PathBuf)> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(root, e))?.path();
        if let Some((class, trial)) = parse_data_name(&path) {
            files.push((class, trial, path));
        }
    }
    if files.is_empty() {
        return Err(Error::Config(format!(
            "{} contains no <class>_<trial>.csv files",
            root.display()
        )));
    }
    files.sort();
    let classes: BTreeSet<usize> = files.iter().map(|f| f.0).collect();
    if classes.len() < 2 {
        return Err(Error::Data(format!("need at least 2 classes, found {}", classes.len())));
    }
    let num_classes = *classes.iter().next_back().unwrap_or(&0);
    if classes.contains(&0) || classes.len() != num_classes {
        return Err(Error::Data(format!(
            "class labels must be 1..=M without gaps, found {classes:?}"
        )));
    }
    let subject = root
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();

    let per_file: Vec<Vec<Segment>> = files
        .par_iter()
        .map(|(class, _, path)| {
            let rows = read_signal_csv(path, manifest.num_channels)?;
            let rec = MultiChannelRecording::from_rows(
                &rows,
                manifest.sampling_rate_hz,
                subject.clone(),
                Some(*class),
            )
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
            segment(&rec, manifest.window_ms)
                .map_err(|e| Error::Data(format!("{}: {e}", path.display())))
        })
        .collect::<Result<_>>()?;

    let segments = per_file.into_iter().flatten().collect();
    Ok(
        SegmentDataset::new(segments, num_classes, manifest.num_channels, manifest.sampling_rate_hz)?
            .with_subject(subject),
    )
}

/// `read_manifest` followed by `load_dataset`.
pub fn load_dataset_dir(root: &Path) -> Result<SegmentDataset> {
    let manifest = read_manifest(root)?;
    load_dataset(root, &manifest)
}

/// Write the canonical dump: one CSV per segment, named so that
/// [`load_dataset_dir`] reads it back unchanged, plus an index and manifest.
pub fn write_dataset(ds: &SegmentDataset, root: &Path) -> Result<()> {
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let seg_len = ds.segments().first().map_or(0, Segment::len);
    let manifest = DatasetManifest {
        sampling_rate_hz: ds.sampling_rate_hz(),
        num_channels: ds.num_channels(),
        window_ms: seg_len as f64 * 1000.0 / ds.sampling_rate_hz(),
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    let mpath = root.join(MANIFEST_FILE);
    fs::write(&mpath, text).map_err(|e| Error::io(&mpath, e))?;

    let mut trial = vec![0usize; ds.num_classes() + 1];
    let mut index = String::from("segment_id,label,file\n");
    for (id, seg) in ds.segments().iter().enumerate() {
        if seg.len() != seg_len {
            return Err(Error::Data("segments of unequal length cannot share a manifest".into()));
        }
        let name = format!("{}_{}.csv", seg.label, trial[seg.label]);
        trial[seg.label] += 1;
        index.push_str(&format!("{id},{},{name}\n", seg.label));
        let path = root.join(&name);
        let mut out = std::io::BufWriter::new(fs::File::create(&path).map_err(|e| Error::io(&path, e))?);
        for t in 0..seg.len() {
            let row: Vec<String> = seg.channels.iter().map(|c| c[t].to_string()).collect();
            writeln!(out, "{}", row.join(",")).map_err(|e| Error::io(&path, e))?;
        }
        out.flush().map_err(|e| Error::io(&path, e))?;
    }
    let ipath = root.join(INDEX_FILE);
    fs::write(&ipath, index).map_err(|e| Error::io(&ipath, e))
}

/// Parameters of the seeded desk-scale benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub num_classes: usize,
    pub num_channels: usize,
    pub segments_per_class: usize,
    pub segment_length: usize,
    pub sampling_rate_hz: f64,
    /// `class_band_centers_hz[class][channel]`.
    pub class_band_centers_hz: Vec<Vec<f64>>,
    /// `class_levels[class][channel]`: mean amplitude (activation level).
    pub class_levels: Vec<Vec<f64>>,
    pub amplitude_jitter: f64,
    /// Std of the white Gaussian texture relative to channel amplitude.
    pub texture_std: f64,
    pub seed: u64,
}

/// Sinusoids summed per channel.
const TONES_PER_CHANNEL: usize = 12;
/// Relative half-width of the band around each center frequency.
const BAND_HALF_WIDTH: f64 = 0.4;
/// Benchmark band centers are `CENTER_BASE_HZ * CENTER_RATIO^i`, `i < 8`.
const CENTER_BASE_HZ: f64 = 60.0;
const CENTER_RATIO: f64 = 1.02;
/// Log-spacing of the five benchmark activation levels.
const LEVEL_STEP: f64 = 0.75;

impl SyntheticSpec {
    /// Benchmark spec at 1 kHz with 500-sample (500 ms) segments.
    ///
    /// Classes differ mostly in their per-channel activation level, as
    /// grasps do in forearm sEMG; broadband spectra around 60-70 Hz overlap
    /// heavily between classes.
    pub fn benchmark(num_classes: usize, num_channels: usize, segments_per_class: usize, seed: u64) -> Self {
        let class_band_centers_hz = (0..num_classes)
            .map(|j| {
                (0..num_channels)
                    .map(|l| CENTER_BASE_HZ * CENTER_RATIO.powi(((3 * j + 5 * l + j * l) % 8) as i32))
                    .collect()
            })
            .collect();
        let class_levels = (0..num_classes)
            .map(|j| (0..num_channels).map(|l| (LEVEL_STEP * (((7 * j + 3 * l + j * l) % 5) as f64 - 2.0)).exp()).collect())
            .collect();
        Self {
            num_classes,
            num_channels,
            segments_per_class,
            class_levels,
            segment_length: 500,
            sampling_rate_hz: 1000.0,
            class_band_centers_hz,
            amplitude_jitter: 0.3,
            texture_std: 0.3,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("synthetic spec: {m}")));
        if self.num_classes < 2 {
            return bad(format!("num_classes must be >= 2, got {}", self.num_classes));
        }
        if self.num_channels < 1 {
            return bad("num_channels must be >= 1".into());
        }
        if self.segments_per_class < 10 {
            return bad(format!("segments_per_class must be >= 10, got {}", self.segments_per_class));
        }
        if self.segment_length < MIN_WINDOW_SAMPLES {
            return bad(format!("segment_length must be >= {MIN_WINDOW_SAMPLES}"));
        }
        if !(self.sampling_rate_hz > 0.0) {
            return bad("sampling_rate_hz must be positive".into());
        }
        if !(self.amplitude_jitter >= 0.0) {
            return bad("amplitude_jitter must be non-negative".into());
        }
        if !(self.texture_std >= 0.0) {
            return bad("texture_std must be non-negative".into());
        }
        if self.class_band_centers_hz.len() != self.num_classes
            || self.class_band_centers_hz.iter().any(|c| c.len() != self.num_channels)
        {
            return bad("class_band_centers_hz must be num_classes x num_channels".into());
        }
        if self.class_levels.len() != self.num_classes
            || self.class_levels.iter().any(|c| c.len() != self.num_channels || c.iter().any(|&a| !(a > 0.0)))
        {
            return bad("class_levels must be num_classes x num_channels positive values".into());
        }
        let nyquist = self.sampling_rate_hz / 2.0;
        for (j, centers) in self.class_band_centers_hz.iter().enumerate() {
            for (l, &f) in centers.iter().enumerate() {
                if !(f > 0.0) || f * (1.0 + BAND_HALF_WIDTH) >= nyquist {
                    return bad(format!(
                        "band center {f} Hz (class {}, channel {l}) must lie below Nyquist {nyquist} Hz",
                        j + 1
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Seeded synthetic dataset: per channel, a dozen sinusoids with random
/// phase drawn inside a band around the class center, scaled by the class
/// activation level and a log-normal jitter, plus white Gaussian texture.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SegmentDataset> {
    spec.validate()?;
    let fs = spec.sampling_rate_hz;
    let segments: Vec<Segment> = (0..spec.num_classes * spec.segments_per_class)
        .into_par_iter()
        .map(|idx| {
            let class = idx / spec.segments_per_class;
            let channels = (0..spec.num_channels)
                .map(|l| {
                    let mut rng = seed::rng(spec.seed, &[idx as u64, l as u64]);
                    let jitter: f64 = rng.sample(StandardNormal);
                    let amp = spec.class_levels[class][l] * (spec.amplitude_jitter * jitter).exp();
                    let center = spec.class_band_centers_hz[class][l];
                    let tones: Vec<(f64, f64)> = (0..TONES_PER_CHANNEL)
                        .map(|_| {
                            let f = center * (1.0 + BAND_HALF_WIDTH * rng.random_range(-1.0..1.0));
                            let phase = rng.random_range(0.0..std::f64::consts::TAU);
                            (f, phase)
                        })
                        .collect();
                    let tone_amp = amp * (2.0 / TONES_PER_CHANNEL as f64).sqrt();
                    (0..spec.segment_length)
                        .map(|t| {
                            let time = t as f64 / fs;
                            let tone: f64 = tones
                                .iter()
                                .map(|&(f, ph)| (std::f64::consts::TAU * f * time + ph).sin())
                                .sum();
                            let texture: f64 = rng.sample(StandardNormal);
                            tone_amp * tone + spec.texture_std * amp * texture
                        })
                        .collect()
                })
                .collect();
            Segment::new(channels, class + 1)
        })
        .collect();
    Ok(SegmentDataset::new(segments, spec.num_classes, spec.num_channels, fs)?.with_subject("synthetic"))
}
