// Run the fuzzy-ensemble comparison (exp3) and write the report bundle.
//
// With no arguments a reduced run is used (2 SNR levels, 5 folds, 1
// repeat). Pass `full` for the benchmark protocol: M = 4 classes, L = 8
// channels, 40 segments per class, 10 folds × 4 repeats, default SNR grid.
// A second argument names the output directory.

use std::path::PathBuf;

use fknn::dataset::{generate_synthetic, SyntheticSpec};
use fknn::eval::experiment::{run_experiment, ExperimentConfig, ExperimentName, ExperimentSettings};
use fknn::eval::report::write_report;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    run(args.first().is_some_and(|a| a == "full"), args.get(1).map(PathBuf::from))
}

fn run(full: bool, out: Option<PathBuf>) -> Result<(), Box<dyn std::error::Error>> {
    let (per_class, settings) = if full {
        (40, ExperimentSettings::default())
    } else {
        (
            15,
            ExperimentSettings {
                snr_grid: vec![0.0, 12.0],
                folds: 5,
                repeats: 1,
                ..ExperimentSettings::default()
            },
        )
    };
    let ds = generate_synthetic(&SyntheticSpec::benchmark(4, 8, per_class, 7))?;
    let cfg = ExperimentConfig::named(ExperimentName::Exp3, settings, 7);
    let report = run_experiment(&[ds], &cfg)?;

    let bac = &report.summaries[0];
    print!("{:>7}", "snr");
    for m in &bac.methods {
        print!("{m:>14}");
    }
    println!();
    for row in &bac.snr {
        print!("{:>7}", row.snr_db);
        for (score, rank) in row.mean_score.iter().zip(&row.average_rank) {
            print!("{:>14}", format!("{score:.3} ({rank:.2})"));
        }
        println!();
    }

    let tmp;
    let out = match out {
        Some(p) => p,
        None => {
            tmp = tempfile::tempdir()?;
            tmp.path().to_path_buf()
        }
    };
    write_report(&report, &out)?;
    println!("report written to {}", out.display());
    Ok(())
}
