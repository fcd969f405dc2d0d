use fknn::classify::FknnEnsemble;
use fknn::eval::experiment::{summarize, Criterion, ExperimentConfig, ExperimentName, ExperimentSettings, MetricRecord};
use fknn::eval::folds::make_folds;
use fknn::eval::stats::holm_adjust;
use fknn::features::FeatureSet;
use fknn::fuzzy::{membership, MembershipKind, MembershipSpec};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = MembershipKind> {
    prop::sample::select(MembershipKind::ALL.to_vec())
}

/// Channels of dimension 2, `n` rows, `m` classes all present.
fn feature_set(max_l: usize) -> impl Strategy<Value = (FeatureSet, Vec<Vec<f64>>, Vec<f64>, usize)> {
    (1..=max_l, 2..=4usize, 6..=20usize).prop_flat_map(|(l, m, n)| {
        let rows = prop::collection::vec(prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 2), l), n);
        let labels = prop::collection::vec(1..=m, n);
        let query = prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 2), l);
        let r = prop::collection::vec(0.0..=1.0f64, l);
        (rows, labels, query, r, 1..=n.min(7)).prop_map(move |(rows, mut labels, query, r, k)| {
            for (j, y) in labels.iter_mut().take(m).enumerate() {
                *y = j + 1;
            }
            (FeatureSet::new(rows, labels, m).unwrap(), query, r, k)
        })
    })
}

fn record(subject: usize, method: &str, snr: f64, repeat: usize, fold: usize, score: f64) -> MetricRecord {
    MetricRecord {
        subject: format!("s{subject}"),
        method: method.into(),
        kind: "-".into(),
        snr_db: snr,
        repeat,
        fold,
        bac: score,
        kappa: score * 2.0 - 1.0,
        f1: score,
    }
}

proptest! {
    #[test]
    fn holm_dominates_raw_and_stays_in_unit_interval(p in prop::collection::vec(0.0..=1.0f64, 1..30)) {
        let adj = holm_adjust(&p);
        for (a, r) in adj.iter().zip(&p) {
            prop_assert!(a >= r && *a <= 1.0);
        }
    }

    #[test]
    fn membership_is_monotone(kind in kind(), a in 0.0..=1.0f64, b in 0.0..=1.0f64, steep in 1.0..30.0f64) {
        let spec = MembershipSpec::with_steepness(kind, steep).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (rl, rh) = (membership(&spec, lo), membership(&spec, hi));
        prop_assert!(rl <= rh);
        prop_assert!((0.0..=1.0).contains(&rl) && (0.0..=1.0).contains(&rh));
    }

    #[test]
    fn supports_form_a_distribution((set, query, r, k) in feature_set(3)) {
        let ens = FknnEnsemble::fit(&set, k).unwrap();
        let s = ens.supports(&query, &r).unwrap();
        prop_assert!(s.d.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert!((s.d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn argmax_survives_positive_scaling((set, query, r, k) in feature_set(3), c in 0.01..100.0f64) {
        let ens = FknnEnsemble::fit(&set, k).unwrap();
        let a = ens.supports(&query, &r).unwrap();
        // Largest factor that keeps every r within [0, 1].
        let top = r.iter().cloned().fold(0.0, f64::max).max(1e-3);
        let scaled: Vec<f64> = r.iter().map(|v| v * c.min(1.0 / top)).collect();
        let b = ens.supports(&query, &scaled).unwrap();
        prop_assert_eq!(a.label(), b.label());
    }

    #[test]
    fn folds_partition_and_stratify(labels in prop::collection::vec(1..=3usize, 12..60), folds in 2..=4usize, seed: u64) {
        let mut labels = labels;
        // At least `folds` items per class.
        for (i, y) in labels.iter_mut().take(3 * folds).enumerate() {
            *y = i % 3 + 1;
        }
        let plan = make_folds(&labels, folds, 2, seed).unwrap();
        for rep in 0..2 {
            let mut seen = vec![0usize; labels.len()];
            for f in 0..folds {
                let test = plan.test_indices(rep, f);
                let train = plan.train_indices(rep, f);
                prop_assert_eq!(test.len() + train.len(), labels.len());
                for &i in &test {
                    seen[i] += 1;
                }
                for class in 1..=3 {
                    let total = labels.iter().filter(|&&y| y == class).count();
                    let here = test.iter().filter(|&&i| labels[i] == class).count();
                    prop_assert!(here * folds + folds > total && here * folds < total + folds);
                }
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn summary_ignores_record_order(scores in prop::collection::vec(0.0..=1.0f64, 5 * 2 * 6), shuffle_seed: u64) {
        let settings = ExperimentSettings { snr_grid: vec![0.0, 12.0], ..ExperimentSettings::default() };
        let cfg = ExperimentConfig::named(ExperimentName::Exp3, settings, 1);
        let mut records = Vec::new();
        let mut it = scores.iter();
        for m in &cfg.methods {
            for snr in [0.0, 12.0] {
                for case in 0..6 {
                    records.push(record(0, &m.id, snr, case / 3, case % 3, *it.next().unwrap()));
                }
            }
        }
        let mut shuffled = records.clone();
        let mut state = shuffle_seed | 1;
        for i in (1..shuffled.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            shuffled.swap(i, (state % (i as u64 + 1)) as usize);
        }
        for c in Criterion::ALL {
            let a = serde_json::to_string(&summarize(&records, &cfg, c)).unwrap();
            let b = serde_json::to_string(&summarize(&shuffled, &cfg, c)).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
