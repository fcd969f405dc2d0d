//! Classification quality criteria over 1-based labels.

/// Balanced accuracy: mean per-class recall over classes present in `truth`.
pub fn bac(truth: &[usize], predicted: &[usize], num_classes: usize) -> f64 {
    assert_eq!(truth.len(), predicted.len());
    let mut hits = vec![0usize; num_classes + 1];
    let mut totals = vec![0usize; num_classes + 1];
    for (&t, &p) in truth.iter().zip(predicted) {
        totals[t] += 1;
        if t == p {
            hits[t] += 1;
        }
    }
    let present: Vec<usize> = (1..=num_classes).filter(|&j| totals[j] > 0).collect();
    if present.len() < num_classes {
        log::warn!(
            "balanced accuracy over {} of {num_classes} classes: others absent from the truth",
            present.len()
        );
    }
    if present.is_empty() {
        return 0.0;
    }
    present.iter().map(|&j| hits[j] as f64 / totals[j] as f64).sum::<f64>() / present.len() as f64
}

/// Cohen's kappa with marginal-product chance agreement; 0 when chance
/// agreement is 1.
pub fn kappa(truth: &[usize], predicted: &[usize]) -> f64 {
    assert_eq!(truth.len(), predicted.len());
    let n = truth.len() as f64;
    if truth.is_empty() {
        return 0.0;
    }
    let size = truth.iter().chain(predicted).copied().max().unwrap_or(0) + 1;
    let mut row = vec![0.0; size];
    let mut col = vec![0.0; size];
    let mut agree = 0.0;
    for (&t, &p) in truth.iter().zip(predicted) {
        row[t] += 1.0;
        col[p] += 1.0;
        if t == p {
            agree += 1.0;
        }
    }
    let po = agree / n;
    let pe: f64 = row.iter().zip(&col).map(|(r, c)| r * c).sum::<f64>() / (n * n);
    if pe >= 1.0 {
        0.0
    } else {
        (po - pe) / (1.0 - pe)
    }
}

/// Micro-averaged F1 from pooled true-positive, false-positive and
/// false-negative counts.
pub fn micro_f1(truth: &[usize], predicted: &[usize]) -> f64 {
    assert_eq!(truth.len(), predicted.len());
    let tp = truth.iter().zip(predicted).filter(|(t, p)| t == p).count() as f64;
    // Every wrong prediction is one false positive (for the predicted class)
    // and one false negative (for the true class).
    let wrong = truth.len() as f64 - tp;
    let (fp, fn_) = (wrong, wrong);
    let denom = 2.0 * tp + fp + fn_;
    let f1 = if denom > 0.0 { 2.0 * tp / denom } else { 0.0 };
    debug_assert!(truth.is_empty() || (f1 - accuracy(truth, predicted)).abs() < 1e-12);
    f1
}

pub fn accuracy(truth: &[usize], predicted: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    truth.iter().zip(predicted).filter(|(t, p)| t == p).count() as f64 / truth.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bac_examples() {
        assert_eq!(bac(&[1, 2, 2, 1], &[1, 2, 2, 1], 2), 1.0);
        // confusion [[1, 1], [0, 2]]
        assert_eq!(bac(&[1, 1, 2, 2], &[1, 2, 2, 2], 2), 0.75);
        assert_eq!(bac(&[1, 2, 3, 1, 2, 3], &[2; 6], 3), 1.0 / 3.0);
    }

    #[test]
    fn bac_skips_absent_classes() {
        assert_eq!(bac(&[1, 1], &[1, 2], 3), 0.5);
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(&[1, 2, 3, 1], &[1, 2, 3, 1]), 1.0);
        assert_eq!(kappa(&[1, 2, 1, 2], &[1, 1, 1, 1]), 0.0);
        assert_eq!(kappa(&[1, 1], &[1, 1]), 0.0);
        let t = [1, 2, 3, 3, 2, 1, 1];
        let p = [1, 3, 3, 2, 2, 1, 2];
        let perm = |v: &[usize]| v.iter().map(|&x| [0, 3, 1, 2][x]).collect::<Vec<_>>();
        assert!((kappa(&t, &p) - kappa(&perm(&t), &perm(&p))).abs() < 1e-15);
    }

    #[test]
    fn f1_examples() {
        assert_eq!(micro_f1(&[1, 2], &[1, 2]), 1.0);
        assert_eq!(micro_f1(&[1, 2], &[2, 1]), 0.0);
    }
}
