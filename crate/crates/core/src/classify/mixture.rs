//! One-dimensional Gaussian mixtures fitted by EM.

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::seed;

pub const VARIANCE_FLOOR: f64 = 1e-9;
pub const EM_RESTARTS: usize = 3;
const EM_MAX_ITER: usize = 100;
const EM_TOL: f64 = 1e-8;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

pub fn gaussian_log_pdf(x: f64, mean: f64, var: f64) -> f64 {
    -LN_SQRT_2PI - 0.5 * var.ln() - 0.5 * (x - mean) * (x - mean) / var
}

pub(crate) fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mixture1d {
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub vars: Vec<f64>,
}

impl Mixture1d {
    pub fn components(&self) -> usize {
        self.weights.len()
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        let terms: Vec<f64> = (0..self.components())
            .map(|c| self.weights[c].ln() + gaussian_log_pdf(x, self.means[c], self.vars[c]))
            .collect();
        log_sum_exp(&terms)
    }

    pub fn log_likelihood(&self, data: &[f64]) -> f64 {
        data.iter().map(|&x| self.log_pdf(x)).sum()
    }

    fn single(data: &[f64]) -> Self {
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Self {
            weights: vec![1.0],
            means: vec![mean],
            vars: vec![var.max(VARIANCE_FLOOR)],
        }
    }

    /// Fit `components` Gaussians with EM, keeping the best of
    /// [`EM_RESTARTS`] starts (quantile start first, then seeded draws).
    /// The component count is reduced when there are fewer points.
    pub fn fit(data: &[f64], components: usize, seed: u64) -> Self {
        assert!(!data.is_empty(), "cannot fit a mixture to no data");
        let m = components.clamp(1, data.len());
        if m == 1 {
            return Self::single(data);
        }
        let mut sorted = data.to_vec();
        sorted.sort_by(f64::total_cmp);
        let base = Self::single(data);
        let mut best: Option<(f64, Self)> = None;
        for restart in 0..EM_RESTARTS {
            let means: Vec<f64> = if restart == 0 {
                (0..m)
                    .map(|c| sorted[((2 * c + 1) * sorted.len()) / (2 * m)])
                    .collect()
            } else {
                let mut rng = seed::rng(seed, &[restart as u64]);
                (0..m).map(|_| data[rng.random_range(0..data.len())]).collect()
            };
            let init = Self {
                weights: vec![1.0 / m as f64; m],
                means,
                vars: vec![base.vars[0]; m],
            };
            let fitted = em(data, init);
            let ll = fitted.log_likelihood(data);
            if ll.is_finite() && best.as_ref().is_none_or(|(b, _)| ll > *b) {
                best = Some((ll, fitted));
            }
        }
        best.map_or(base, |(_, m)| m)
    }
}

fn em(data: &[f64], mut model: Mixture1d) -> Mixture1d {
    let n = data.len();
    let m = model.components();
    let mut resp = vec![0.0; n * m];
    let mut last = f64::NEG_INFINITY;
    for _ in 0..EM_MAX_ITER {
        let mut ll = 0.0;
        let mut terms = vec![0.0; m];
        for (i, &x) in data.iter().enumerate() {
            for (c, term) in terms.iter_mut().enumerate() {
                *term = model.weights[c].ln() + gaussian_log_pdf(x, model.means[c], model.vars[c]);
            }
            let norm = log_sum_exp(&terms);
            ll += norm;
            for c in 0..m {
                resp[i * m + c] = (terms[c] - norm).exp();
            }
        }
        for c in 0..m {
            let nk: f64 = (0..n).map(|i| resp[i * m + c]).sum();
            if nk <= 1e-12 {
                // Empty component: park it on the global fit with negligible weight.
                model.weights[c] = 1e-12;
                continue;
            }
            let mean = (0..n).map(|i| resp[i * m + c] * data[i]).sum::<f64>() / nk;
            let var = (0..n)
                .map(|i| resp[i * m + c] * (data[i] - mean).powi(2))
                .sum::<f64>()
                / nk;
            model.weights[c] = nk / n as f64;
            model.means[c] = mean;
            model.vars[c] = var.max(VARIANCE_FLOOR);
        }
        let total: f64 = model.weights.iter().sum();
        model.weights.iter_mut().for_each(|w| *w /= total);
        if (ll - last).abs() <= EM_TOL * ll.abs().max(1.0) {
            break;
        }
        last = ll;
    }
    model
}
