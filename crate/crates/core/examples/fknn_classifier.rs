// Train the full classifier (features, detectors, fuzzy KNN ensemble) and
// compare its accuracy on clean and contaminated held-out segments. The
// per-channel memberships of one contaminated segment are printed next to
// its ground-truth mask.

use fknn::contam::{contaminate_dataset, ContaminationPlan};
use fknn::dataset::{generate_synthetic, SyntheticSpec};
use fknn::eval::metrics::bac;
use fknn::model::{FknnModel, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = generate_synthetic(&SyntheticSpec::benchmark(4, 8, 20, 7))?;
    let idx: Vec<usize> = (0..ds.len()).collect();
    let (train_idx, test_idx): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| i % 5 != 0);
    let model = FknnModel::train(&ds.subset(&train_idx), &TrainConfig::default(), 1)?;
    println!("K = {}, membership = {}", model.ensemble.k, model.membership.kind);

    let test = ds.subset(&test_idx);
    let truth = test.labels();
    for snr in [f64::INFINITY, 12.0, 0.0] {
        let set = if snr.is_finite() {
            contaminate_dataset(&test, &ContaminationPlan::new(snr, 3))?.0
        } else {
            test.clone()
        };
        let pred = set
            .segments()
            .iter()
            .map(|s| Ok(model.predict_segment(s)?.prediction.label))
            .collect::<fknn::Result<Vec<_>>>()?;
        let name = if snr.is_finite() { format!("{snr} dB") } else { "clean".into() };
        println!("{name:>6}: BAC {:.3}", bac(&truth, &pred, ds.num_classes()));
    }

    let (noisy, masks) = contaminate_dataset(&test, &ContaminationPlan::new(0.0, 3))?;
    let p = model.predict_segment(&noisy.segments()[0])?;
    for (l, r) in p.prediction.memberships.iter().enumerate() {
        let state = masks[0][l].as_ref().map_or("clean".to_string(), |c| c.kind.to_string());
        println!("channel {l}: r = {r:.3} ({state})");
    }
    println!("supports {:?} -> label {}", p.prediction.supports.d, p.prediction.label);
    Ok(())
}
