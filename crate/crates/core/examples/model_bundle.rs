// Save a trained model directory, reload it and classify a segment file,
// the same path the `train` and `predict` commands take.

use fknn::dataset::{generate_synthetic, read_segment_csv, SyntheticSpec};
use fknn::model::{FknnModel, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = generate_synthetic(&SyntheticSpec::benchmark(3, 4, 12, 9))?;
    let model = FknnModel::train(&ds, &TrainConfig::default(), 9)?;

    let dir = tempfile::tempdir()?;
    model.save(dir.path())?;
    let loaded = FknnModel::load(dir.path())?;
    let mut files: Vec<String> = std::fs::read_dir(dir.path())?
        .map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect::<Result<_, _>>()?;
    files.sort();
    println!("{}", files.join(" "));

    // A segment file is samples × channels, comma separated, no header.
    let seg = &ds.segments()[5];
    let path = dir.path().join("segment.csv");
    let text: String = (0..seg.len())
        .map(|t| seg.channels.iter().map(|c| c[t].to_string()).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    std::fs::write(&path, text)?;

    let p = loaded.predict_segment(&read_segment_csv(&path, loaded.num_channels())?)?;
    println!("true label {}, predicted {}", seg.label, p.prediction.label);
    println!("supports {:?}", p.prediction.supports.d);
    println!("memberships {:?}", p.prediction.memberships);
    Ok(())
}
