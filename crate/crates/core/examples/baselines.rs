// Attribute-weighting baselines (B, AW, AWc) over KNN, Gaussian naive Bayes
// and mixture naive Bayes on one contaminated test split.

use fknn::classify::baseline::{baseline_predict, tune_k_knn, GaussianNb, MixtureNb, MixtureTuning, WeightedKnn};
use fknn::classify::{BaselineModel, KTuning, Weighting};
use fknn::contam::{contaminate_dataset, ContaminationPlan};
use fknn::dataset::{generate_synthetic, SyntheticSpec};
use fknn::eval::metrics::bac;
use fknn::features::{extract_dataset, WaveletSpec};
use fknn::fuzzy::{normalize_score, MembershipKind, MembershipSpec};
use fknn::occ::{fit_channel_detectors, DetectorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = generate_synthetic(&SyntheticSpec::benchmark(3, 6, 20, 2))?;
    let idx: Vec<usize> = (0..ds.len()).collect();
    let (train_idx, test_idx): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| i % 4 != 0);
    let wavelet = WaveletSpec::default();
    let train = extract_dataset(&ds.subset(&train_idx), &wavelet)?;

    let per_channel: Vec<_> = (0..train.num_channels()).map(|l| train.channel(l)).collect();
    let detectors = fit_channel_detectors(&per_channel, &DetectorConfig::default())?;
    let k = tune_k_knn(&train, &KTuning::default())?.k;
    let models = [
        ("KNN", BaselineModel::Knn(WeightedKnn::fit(&train, k)?)),
        ("GNB", BaselineModel::Gnb(GaussianNb::fit(&train)?)),
        ("NBM", BaselineModel::Nbm(MixtureNb::fit(&train, &MixtureTuning::default())?)),
    ];

    let (noisy, _) = contaminate_dataset(&ds.subset(&test_idx), &ContaminationPlan::new(0.0, 4))?;
    let test = extract_dataset(&noisy, &wavelet)?;
    let spec = MembershipSpec::new(MembershipKind::Nt);
    let coords: Vec<Vec<f64>> = test
        .rows
        .iter()
        .map(|row| row.iter().zip(&detectors).map(|(x, d)| normalize_score(d.decision(x), &d.band)).collect())
        .collect();

    println!("BAC at 0 dB (K = {k} for KNN)");
    for (name, model) in &models {
        for w in Weighting::ALL {
            let pred = test
                .rows
                .iter()
                .zip(&coords)
                .map(|(x, t)| {
                    let r: Vec<f64> = t.iter().map(|&t| fknn::fuzzy::membership(&spec, t)).collect();
                    Ok(baseline_predict(model, w, x, &r, t)?.label)
                })
                .collect::<fknn::Result<Vec<_>>>()?;
            println!("{:>8}: {:.3}", format!("{w}-{name}"), bac(&test.labels, &pred, test.num_classes));
        }
    }
    Ok(())
}
