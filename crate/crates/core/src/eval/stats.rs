//! Pairwise comparison statistics: Wilcoxon signed-rank test, Holm
//! step-down adjustment and average ranks.

use serde::{Deserialize, Serialize};

/// Samples up to this size use the exact null distribution.
pub const EXACT_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WilcoxonMethod {
    Exact,
    Normal,
    /// No non-zero differences.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Non-zero differences used.
    pub n: usize,
    /// Sum of ranks of positive differences `a − b`.
    pub w_plus: f64,
    pub p_value: f64,
    pub method: WilcoxonMethod,
}

/// Average ranks (1-based) of `values`, ties sharing the mean rank.
pub fn rank_average(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = r;
        }
        i = j + 1;
    }
    ranks
}

fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// Two-sided Wilcoxon signed-rank test of paired samples.
///
/// Zero differences are dropped and tied absolute differences get averaged
/// ranks. Up to [`EXACT_MAX_N`] remaining pairs the p-value comes from the
/// exact permutation distribution of `W+` (computed over the actual, possibly
/// tied, ranks); above that a tie-corrected normal approximation without
/// continuity correction is used.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> WilcoxonResult {
    assert_eq!(a.len(), b.len(), "paired samples must have equal length");
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return WilcoxonResult {
            n: 0,
            w_plus: 0.0,
            p_value: 1.0,
            method: WilcoxonMethod::Degenerate,
        };
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = rank_average(&abs);
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();

    if n <= EXACT_MAX_N {
        // Doubled ranks are integers even with ties.
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let total: usize = doubled.iter().sum();
        let mut counts = vec![0.0f64; total + 1];
        counts[0] = 1.0;
        for &r in &doubled {
            for s in (r..=total).rev() {
                counts[s] += counts[s - r];
            }
        }
        let all = 2f64.powi(n as i32);
        let w2 = (2.0 * w_plus).round() as usize;
        let lower: f64 = counts[..=w2].iter().sum::<f64>() / all;
        let upper: f64 = counts[w2..].iter().sum::<f64>() / all;
        WilcoxonResult {
            n,
            w_plus,
            p_value: (2.0 * lower.min(upper)).min(1.0),
            method: WilcoxonMethod::Exact,
        }
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let mut sorted = abs.clone();
        sorted.sort_by(f64::total_cmp);
        let mut tie_term = 0.0;
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i;
            while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
                j += 1;
            }
            let t = (j - i + 1) as f64;
            tie_term += t * t * t - t;
            i = j + 1;
        }
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let p = if var > 0.0 {
            let z = (w_plus - mean) / var.sqrt();
            (2.0 * normal_sf(z.abs())).min(1.0)
        } else {
            1.0
        };
        WilcoxonResult {
            n,
            w_plus,
            p_value: p,
            method: WilcoxonMethod::Normal,
        }
    }
}

/// Holm step-down adjusted p-values, returned in input order.
pub fn holm_adjust(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let mut adjusted = vec![0.0; m];
    let mut running: f64 = 0.0;
    for (i, &o) in order.iter().enumerate() {
        running = running.max((p[o] * (m - i) as f64).min(1.0));
        adjusted[o] = running;
    }
    adjusted
}

/// Mean rank per method over cases; `scores[case][method]`, higher is
/// better, rank 1 is best, ties averaged.
pub fn average_ranks(scores: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = scores.first() else {
        return Vec::new();
    };
    let mut sum = vec![0.0; first.len()];
    for case in scores {
        let negated: Vec<f64> = case.iter().map(|v| -v).collect();
        for (s, r) in sum.iter_mut().zip(rank_average(&negated)) {
            *s += r;
        }
    }
    sum.iter().map(|s| s / scores.len() as f64).collect()
}
