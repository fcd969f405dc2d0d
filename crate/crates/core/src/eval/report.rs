//! On-disk report bundle.
//!
//! ```text
//! <out>/records.csv          one row per MetricRecord
//! <out>/ranks_<crit>.csv     snr_db, then one average-rank column per method
//! <out>/stats_<crit>.json    ComparisonSummary (p, Holm p, significance)
//! <out>/manifest.json        config, seed, subjects, crate version
//! <out>/predictions.csv      only when dump_predictions is set
//! ```
//!
//! Nothing time- or host-dependent is written, so reruns are byte-identical.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::experiment::{ComparisonSummary, EvaluationReport, ExperimentConfig};

#[derive(Serialize)]
struct Manifest<'a> {
    crate_name: &'static str,
    crate_version: &'static str,
    seed: u64,
    subjects: &'a [String],
    records: usize,
    config: &'a ExperimentConfig,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Data(format!("{}: {e}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Data(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_records(path: &Path, report: &EvaluationReport) -> Result<()> {
    let mut w = csv_writer(path)?;
    for r in &report.records {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_ranks(path: &Path, summary: &ComparisonSummary) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["snr_db".to_string()];
    header.extend(summary.methods.iter().cloned());
    w.write_record(&header).map_err(csv_err(path))?;
    for row in &summary.snr {
        let mut fields = vec![row.snr_db.to_string()];
        fields.extend(row.average_rank.iter().map(f64::to_string));
        w.write_record(&fields).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_predictions(path: &Path, report: &EvaluationReport) -> Result<()> {
    let mut w = csv_writer(path)?;
    let m = report.predictions.first().map_or(0, |p| p.supports.len());
    let mut header: Vec<String> = ["subject", "repeat", "fold", "snr_db", "segment_id", "true_label", "method_id", "predicted_label"]
        .map(String::from)
        .to_vec();
    header.extend((1..=m).map(|j| format!("d_{j}")));
    header.push("fallback_flag".into());
    w.write_record(&header).map_err(csv_err(path))?;
    for p in &report.predictions {
        let mut fields = vec![
            p.subject.clone(),
            p.repeat.to_string(),
            p.fold.to_string(),
            p.snr_db.to_string(),
            p.segment_id.to_string(),
            p.true_label.to_string(),
            p.method.clone(),
            p.predicted_label.to_string(),
        ];
        fields.extend(p.supports.iter().map(f64::to_string));
        fields.push(u8::from(p.fallback).to_string());
        w.write_record(&fields).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Write the full bundle into `dir`, creating it if needed.
pub fn write_report(report: &EvaluationReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_records(&dir.join("records.csv"), report)?;
    for summary in &report.summaries {
        let tag = summary.criterion.tag();
        write_ranks(&dir.join(format!("ranks_{tag}.csv")), summary)?;
        write_json(&dir.join(format!("stats_{tag}.json")), summary)?;
    }
    if report.config.settings.dump_predictions {
        write_predictions(&dir.join("predictions.csv"), report)?;
    }
    write_json(
        &dir.join("manifest.json"),
        &Manifest {
            crate_name: env!("CARGO_PKG_NAME"),
            crate_version: env!("CARGO_PKG_VERSION"),
            seed: report.config.seed,
            subjects: &report.subjects,
            records: report.records.len(),
            config: &report.config,
        },
    )
}
