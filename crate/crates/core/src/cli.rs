//! Command-line front end used by the `fknn` binary.
//!
//! All commands read one TOML run configuration (`--config`); `--seed` and
//! `--out` override the file. A minimal configuration:
//!
//! ```toml
//! seed = 7
//!
//! [data]
//! paths = ["data/subject1", "data/subject2"]   # or use [data.synthetic]
//!
//! [experiment]
//! snr_grid = [0.0, 6.0, 12.0]
//! folds = 10
//! repeats = 4
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::contam::{contaminate_dataset, write_mask_sidecar, ContaminationPlan, NoiseKind, NoiseParams};
use crate::dataset::{generate_synthetic, load_dataset_dir, read_segment_csv, write_dataset, SegmentDataset, SyntheticSpec};
use crate::error::{Error, Result};
use crate::eval::experiment::{run_experiment, ExperimentConfig, ExperimentName, ExperimentSettings, Method};
use crate::eval::report::write_report;
use crate::features::{extract_dataset, write_feature_cache};
use crate::model::{FknnModel, TrainConfig};
use crate::seed;

#[derive(Debug, Parser)]
#[command(name = "fknn", version, about = "Noise-tolerant multichannel sEMG classification")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output location; overrides the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset directory.
    Synth,
    /// Contaminate a dataset and write it with a mask sidecar.
    Inject {
        /// Dataset directory (default: first configured path).
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Target SNR in dB (default: `inject.snr_db`).
        #[arg(long)]
        snr: Option<f64>,
    },
    /// Extract wavelet features into a CSV cache.
    Extract {
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Train a model directory on a clean dataset.
    Train {
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Classify one segment file, or every segment of a dataset.
    Predict {
        /// Model directory written by `train`.
        #[arg(long)]
        model: PathBuf,
        /// Samples × channels CSV holding a single segment.
        #[arg(long, conflicts_with = "dataset")]
        segment: Option<PathBuf>,
        /// Dataset directory; predictions are written as CSV.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Run exp1, exp2, exp3 or a custom roster (`custom`, from `methods`).
    Experiment { name: String },
}

/// `[data]` section: dataset directories or a synthetic benchmark.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    /// One dataset directory per subject.
    pub paths: Vec<PathBuf>,
    pub synthetic: Option<SyntheticSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticSection {
    pub num_classes: usize,
    pub num_channels: usize,
    pub segments_per_class: usize,
    /// Independently seeded synthetic subjects.
    pub subjects: usize,
}

impl Default for SyntheticSection {
    fn default() -> Self {
        Self {
            num_classes: 4,
            num_channels: 8,
            segments_per_class: 40,
            subjects: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InjectSection {
    pub snr_db: f64,
    pub kinds: Vec<NoiseKind>,
    pub params: NoiseParams,
}

impl Default for InjectSection {
    fn default() -> Self {
        Self {
            snr_db: 6.0,
            kinds: NoiseKind::ALL.to_vec(),
            params: NoiseParams::default(),
        }
    }
}

/// The whole run configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub data: DataSection,
    /// Methods appended to a named roster, or the whole roster of `custom`.
    pub methods: Vec<String>,
    pub experiment: ExperimentSettings,
    pub train: TrainConfig,
    pub inject: InjectSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("invalid run configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("a seed is required (set `seed` in the config or pass --seed)".into()))
    }

    fn out(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| Error::Config("an output location is required (set `out` or pass --out)".into()))
    }

    fn datasets(&self) -> Result<Vec<SegmentDataset>> {
        let seed = self.seed()?;
        match (&self.data.synthetic, self.data.paths.is_empty()) {
            (Some(_), false) => Err(Error::Config("set either data.paths or data.synthetic, not both".into())),
            (Some(syn), true) => synthetic_subjects(syn, seed),
            (None, false) => self.data.paths.iter().map(|p| load_dataset_dir(p)).collect(),
            (None, true) => Err(Error::Config("no data configured (data.paths or data.synthetic)".into())),
        }
    }

    fn dataset(&self, explicit: Option<&Path>) -> Result<SegmentDataset> {
        match explicit {
            Some(p) => load_dataset_dir(p),
            None => Ok(self.datasets()?.swap_remove(0)),
        }
    }
}

fn synthetic_subjects(syn: &SyntheticSection, seed: u64) -> Result<Vec<SegmentDataset>> {
    if syn.subjects == 0 {
        return Err(Error::Config("data.synthetic.subjects must be positive".into()));
    }
    (0..syn.subjects)
        .map(|s| {
            let spec = SyntheticSpec::benchmark(
                syn.num_classes,
                syn.num_channels,
                syn.segments_per_class,
                seed::derive(seed, &[s as u64]),
            );
            Ok(generate_synthetic(&spec)?.with_subject(format!("synthetic{s}")))
        })
        .collect()
}

fn resolve(common: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    if common.out.is_some() {
        cfg.out = common.out.clone();
    }
    Ok(cfg)
}

fn cmd_synth(cfg: &RunConfig) -> Result<()> {
    let syn = cfg.data.synthetic.clone().unwrap_or_default();
    let out = cfg.out()?;
    let subjects = synthetic_subjects(&syn, cfg.seed()?)?;
    if subjects.len() == 1 {
        write_dataset(&subjects[0], out)?;
    } else {
        for ds in &subjects {
            write_dataset(ds, &out.join(ds.subject_id()))?;
        }
    }
    log::info!("wrote {} synthetic subject(s) to {}", subjects.len(), out.display());
    Ok(())
}

fn cmd_inject(cfg: &RunConfig, dataset: Option<&Path>, snr: Option<f64>) -> Result<()> {
    let ds = cfg.dataset(dataset)?;
    let out = cfg.out()?;
    let plan = ContaminationPlan {
        snr_db: snr.unwrap_or(cfg.inject.snr_db),
        seed: cfg.seed()?,
        kinds: cfg.inject.kinds.clone(),
        params: cfg.inject.params,
    };
    if !plan.in_default_grid() {
        log::warn!("SNR {} dB is outside the default grid; continuing", plan.snr_db);
    }
    let (noisy, masks) = contaminate_dataset(&ds, &plan)?;
    write_dataset(&noisy, out)?;
    write_mask_sidecar(&out.join("masks.csv"), &masks)?;
    Ok(())
}

fn cmd_extract(cfg: &RunConfig, dataset: Option<&Path>) -> Result<()> {
    let ds = cfg.dataset(dataset)?;
    let features = extract_dataset(&ds, &cfg.train.wavelet)?;
    write_feature_cache(cfg.out()?, &features, &cfg.train.wavelet)
}

fn cmd_train(cfg: &RunConfig, dataset: Option<&Path>) -> Result<()> {
    let ds = cfg.dataset(dataset)?;
    let model = FknnModel::train(&ds, &cfg.train, cfg.seed()?)?;
    model.save(cfg.out()?)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(",")
}

fn cmd_predict(cfg: &RunConfig, model: &Path, segment: Option<&Path>, dataset: Option<&Path>) -> Result<()> {
    let model = FknnModel::load(model)?;
    if let Some(path) = segment {
        let seg = read_segment_csv(path, model.num_channels())?;
        let p = model.predict_segment(&seg)?;
        println!("label={}", p.prediction.label);
        println!("supports={}", fmt_list(&p.prediction.supports.d));
        println!("memberships={}", fmt_list(&p.prediction.memberships));
        println!("fallback={}", u8::from(p.prediction.fallback()));
        return Ok(());
    }
    let path = dataset.ok_or_else(|| Error::Config("predict needs --segment or --dataset".into()))?;
    let ds = load_dataset_dir(path)?;
    let mut text = String::from("segment_id,true_label,method_id,predicted_label");
    for j in 1..=model.num_classes() {
        text.push_str(&format!(",d_{j}"));
    }
    text.push_str(",fallback_flag\n");
    for (id, seg) in ds.segments().iter().enumerate() {
        let p = model.predict_segment(seg)?.prediction;
        text.push_str(&format!("{id},{},FKNN,{}", seg.label, p.label));
        for d in &p.supports.d {
            text.push_str(&format!(",{d}"));
        }
        text.push_str(&format!(",{}\n", u8::from(p.fallback())));
    }
    match &cfg.out {
        Some(out) => fs::write(out, text).map_err(|e| Error::Io {
            path: out.clone(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Experiment configuration for `name` (`exp1|exp2|exp3|custom`).
pub fn experiment_config(cfg: &RunConfig, name: &str) -> Result<ExperimentConfig> {
    let seed = cfg.seed()?;
    if name == "custom" {
        return ExperimentConfig::custom(&cfg.methods, cfg.experiment.clone(), seed);
    }
    let name: ExperimentName = name.parse()?;
    let mut exp = ExperimentConfig::named(name, cfg.experiment.clone(), seed);
    for id in &cfg.methods {
        exp.methods.push(Method::parse(id, cfg.experiment.fknn_kind)?);
    }
    Ok(exp)
}

fn cmd_experiment(cfg: &RunConfig, name: &str) -> Result<()> {
    let exp = experiment_config(cfg, name)?;
    exp.validate()?;
    let out = cfg.out()?;
    let datasets = cfg.datasets()?;
    let report = run_experiment(&datasets, &exp)?;
    write_report(&report, out)?;
    log::info!("wrote {} records to {}", report.records.len(), out.display());
    Ok(())
}

/// Execute a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    if let Some(jobs) = cli.common.jobs {
        if jobs == 0 {
            return Err(Error::Config("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot size the worker pool: {e}")))?;
    }
    let cfg = resolve(&cli.common)?;
    match &cli.command {
        Command::Synth => cmd_synth(&cfg),
        Command::Inject { dataset, snr } => cmd_inject(&cfg, dataset.as_deref(), *snr),
        Command::Extract { dataset } => cmd_extract(&cfg, dataset.as_deref()),
        Command::Train { dataset } => cmd_train(&cfg, dataset.as_deref()),
        Command::Predict { model, segment, dataset } => {
            cmd_predict(&cfg, model, segment.as_deref(), dataset.as_deref())
        }
        Command::Experiment { name } => cmd_experiment(&cfg, name),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
