// Three-level db6 decomposition of one channel and the MAV/SSC feature
// vector built from it.

use fknn::dataset::{generate_synthetic, SyntheticSpec};
use fknn::features::wavelet::dwt_decompose;
use fknn::features::{channel_features, feature_names, WaveletSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = generate_synthetic(&SyntheticSpec::benchmark(2, 2, 10, 3))?;
    let x = &ds.segments()[0].channels[0];
    let spec = WaveletSpec::default();

    let bands = dwt_decompose(x, &spec)?;
    let names = ["D1", "D2", "D3", "A3"];
    for (name, band) in names.iter().zip(&bands) {
        let energy: f64 = band.iter().map(|v| v * v).sum();
        println!("{name}: {:>4} coefficients, energy {energy:.3}", band.len());
    }

    let f = channel_features(x, &spec)?;
    for (name, value) in feature_names(&spec).iter().zip(&f) {
        println!("{name:<8} {value:.4}");
    }
    Ok(())
}
