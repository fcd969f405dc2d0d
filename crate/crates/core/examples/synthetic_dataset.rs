// Generate the seeded synthetic benchmark, write it in the on-disk layout
// and load it back.

use fknn::dataset::{generate_synthetic, load_dataset_dir, write_dataset, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec::benchmark(3, 4, 10, 42);
    let ds = generate_synthetic(&spec)?;
    println!(
        "{} segments, {} classes, {} channels, {} samples at {} Hz",
        ds.len(),
        ds.num_classes(),
        ds.num_channels(),
        ds.segments()[0].len(),
        ds.sampling_rate_hz()
    );

    let dir = tempfile::tempdir()?;
    write_dataset(&ds, dir.path())?;
    let back = load_dataset_dir(dir.path())?;
    assert_eq!(back.len(), ds.len());
    assert_eq!(back.labels(), ds.labels());
    println!("round trip through {} ok", dir.path().display());
    Ok(())
}
