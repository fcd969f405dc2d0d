//! Per-channel wavelet features.
//!
//! Each channel of a segment is decomposed with db6 into `D1..Dn` and `An`;
//! every band contributes its mean absolute value and slope-sign-change
//! count. For three levels the per-channel vector is
//!
//! ```text
//! [mav(D1), ssc(D1), mav(D2), ssc(D2), mav(D3), ssc(D3), mav(A3), ssc(A3)]
//! ```

pub mod wavelet;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Segment, SegmentDataset};
use crate::error::{Error, Result};

pub use wavelet::{dwt_decompose, Extension, WaveletSpec};

/// Mean absolute value.
pub fn mav(c: &[f64]) -> f64 {
    assert!(!c.is_empty(), "mav of an empty vector");
    c.iter().map(|v| v.abs()).sum::<f64>() / c.len() as f64
}

/// Number of interior points where the slope changes sign (threshold 0).
pub fn ssc(c: &[f64]) -> usize {
    assert!(c.len() >= 3, "ssc needs at least 3 values");
    c.windows(3)
        .filter(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0)
        .count()
}

pub fn features_per_channel(spec: &WaveletSpec) -> usize {
    2 * (spec.levels + 1)
}

/// Feature vector of one channel.
pub fn channel_features(x: &[f64], spec: &WaveletSpec) -> Result<Vec<f64>> {
    let bands = dwt_decompose(x, spec)?;
    Ok(bands
        .iter()
        .flat_map(|b| [mav(b), ssc(b) as f64])
        .collect())
}

/// One feature vector per channel.
pub fn extract_features(seg: &Segment, spec: &WaveletSpec) -> Result<Vec<Vec<f64>>> {
    seg.channels.iter().map(|c| channel_features(c, spec)).collect()
}

/// Features of a whole dataset, indexed `[segment][channel][attribute]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    pub rows: Vec<Vec<Vec<f64>>>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
}

impl FeatureSet {
    pub fn new(rows: Vec<Vec<Vec<f64>>>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Data("feature rows and labels differ in length".into()));
        }
        if let Some(first) = rows.first() {
            let shape: Vec<usize> = first.iter().map(Vec::len).collect();
            if rows.iter().any(|r| r.iter().map(Vec::len).ne(shape.iter().copied())) {
                return Err(Error::Data("feature rows have inconsistent shapes".into()));
            }
        }
        if labels.iter().any(|&y| y == 0 || y > num_classes) {
            return Err(Error::Data(format!("labels must lie in 1..={num_classes}")));
        }
        Ok(Self {
            rows,
            labels,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn num_channels(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn channel_dim(&self, l: usize) -> usize {
        self.rows.first().map_or(0, |r| r[l].len())
    }

    /// All vectors of channel `l`.
    pub fn channel(&self, l: usize) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r[l].clone()).collect()
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            num_classes: self.num_classes,
        }
    }
}

/// Extract features for every segment; order follows the dataset.
pub fn extract_dataset(ds: &SegmentDataset, spec: &WaveletSpec) -> Result<FeatureSet> {
    let rows = ds
        .segments()
        .par_iter()
        .map(|s| extract_features(s, spec))
        .collect::<Result<Vec<_>>>()?;
    FeatureSet::new(rows, ds.labels(), ds.num_classes())
}

/// Per-channel, per-attribute z-scoring fitted on training features.
///
/// Attributes with zero spread are centered but not scaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<Vec<f64>>,
    pub scale: Vec<Vec<f64>>,
}

impl Standardizer {
    pub fn fit(train: &FeatureSet) -> Self {
        let n = train.len() as f64;
        let mut mean = Vec::new();
        let mut scale = Vec::new();
        for l in 0..train.num_channels() {
            let d = train.channel_dim(l);
            let m: Vec<f64> = (0..d)
                .map(|a| train.rows.iter().map(|r| r[l][a]).sum::<f64>() / n)
                .collect();
            let s: Vec<f64> = (0..d)
                .map(|a| {
                    let var = train.rows.iter().map(|r| (r[l][a] - m[a]).powi(2)).sum::<f64>() / n;
                    if var > 0.0 { var.sqrt() } else { 1.0 }
                })
                .collect();
            mean.push(m);
            scale.push(s);
        }
        Self { mean, scale }
    }

    /// Identity transform for `dims[l]`-dimensional channels.
    pub fn identity(dims: &[usize]) -> Self {
        Self {
            mean: dims.iter().map(|&d| vec![0.0; d]).collect(),
            scale: dims.iter().map(|&d| vec![1.0; d]).collect(),
        }
    }

    pub fn apply_row(&self, row: &[Vec<f64>]) -> Vec<Vec<f64>> {
        row.iter()
            .enumerate()
            .map(|(l, x)| {
                x.iter()
                    .enumerate()
                    .map(|(a, v)| (v - self.mean[l][a]) / self.scale[l][a])
                    .collect()
            })
            .collect()
    }

    pub fn apply(&self, set: &FeatureSet) -> FeatureSet {
        FeatureSet {
            rows: set.rows.iter().map(|r| self.apply_row(r)).collect(),
            labels: set.labels.clone(),
            num_classes: set.num_classes,
        }
    }
}

/// Column names of the per-channel feature vector.
pub fn feature_names(spec: &WaveletSpec) -> Vec<String> {
    let mut bands: Vec<String> = (1..=spec.levels).map(|i| format!("d{i}")).collect();
    bands.push(format!("a{}", spec.levels));
    bands
        .iter()
        .flat_map(|b| [format!("mav_{b}"), format!("ssc_{b}")])
        .collect()
}

/// Write the feature cache: a `#` header line describing the layout, then
/// `segment_id,channel,f1..fD,label`.
pub fn write_feature_cache(path: &Path, set: &FeatureSet, spec: &WaveletSpec) -> Result<()> {
    let d = features_per_channel(spec);
    let mut out = format!(
        "# wavelet=db6 levels={} extension={:?} granularity=per-level order={}\n",
        spec.levels,
        spec.extension,
        feature_names(spec).join("|")
    )
    .to_lowercase();
    let cols: Vec<String> = (1..=d).map(|i| format!("f{i}")).collect();
    out.push_str(&format!("segment_id,channel,{},label\n", cols.join(",")));
    for (id, (row, label)) in set.rows.iter().zip(&set.labels).enumerate() {
        for (l, x) in row.iter().enumerate() {
            let vals: Vec<String> = x.iter().map(f64::to_string).collect();
            out.push_str(&format!("{id},{l},{},{label}\n", vals.join(",")));
        }
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Read a cache written by [`write_feature_cache`].
pub fn read_feature_cache(path: &Path, num_classes: usize) -> Result<FeatureSet> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut labels = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |msg: &str| Error::DataAt {
            path: path.to_path_buf(),
            line,
            msg: msg.to_string(),
        };
        if rec.len() < 4 {
            return Err(bad("too few columns"));
        }
        let id: usize = rec[0].parse().map_err(|_| bad("bad segment_id"))?;
        let label: usize = rec[rec.len() - 1].parse().map_err(|_| bad("bad label"))?;
        let x = (2..rec.len() - 1)
            .map(|i| rec[i].parse::<f64>().map_err(|_| bad("bad feature value")))
            .collect::<Result<Vec<f64>>>()?;
        if id == rows.len() {
            rows.push(Vec::new());
            labels.push(label);
        } else if id + 1 != rows.len() {
            return Err(bad("segment ids must be contiguous and ordered"));
        }
        rows[id].push(x);
    }
    FeatureSet::new(rows, labels, num_classes)
}
