//! Daubechies-6 discrete wavelet transform (Mallat cascade).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// db6 decomposition low-pass filter (12 taps), Daubechies tables.
pub const DB6_DEC_LO: [f64; 12] = [
    -0.001_077_301_085_308_479_6,
    0.004_777_257_510_945_511,
    0.000_553_842_201_161_496_1,
    -0.031_582_039_317_486_03,
    0.027_522_865_530_305_727,
    0.097_501_605_587_323_04,
    -0.129_766_867_567_261_94,
    -0.226_264_693_965_439_83,
    0.315_250_351_709_197_63,
    0.751_133_908_021_095_4,
    0.494_623_890_398_453_06,
    0.111_540_743_350_109_47,
];

pub const FILTER_LEN: usize = DB6_DEC_LO.len();

/// Quadrature-mirror high-pass partner of [`DB6_DEC_LO`].
pub fn db6_dec_hi() -> [f64; FILTER_LEN] {
    let mut hi = [0.0; FILTER_LEN];
    for (k, h) in hi.iter_mut().enumerate() {
        let v = DB6_DEC_LO[FILTER_LEN - 1 - k];
        *h = if k % 2 == 0 { -v } else { v };
    }
    hi
}

/// Boundary handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extension {
    /// Half-sample symmetric reflection; output length `floor((n + 11) / 2)`.
    Symmetric,
    /// Circular wrap; output length `n / 2`. Orthogonal, so energy is preserved.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveletSpec {
    pub levels: usize,
    pub extension: Extension,
}

impl Default for WaveletSpec {
    fn default() -> Self {
        Self {
            levels: 3,
            extension: Extension::Symmetric,
        }
    }
}

impl WaveletSpec {
    pub fn min_length(&self) -> usize {
        FILTER_LEN << self.levels
    }
}

/// Index into a length-`n` signal after boundary extension.
pub(crate) fn extend_index(j: isize, n: usize, ext: Extension) -> usize {
    let n = n as isize;
    match ext {
        Extension::Periodic => j.rem_euclid(n) as usize,
        Extension::Symmetric => {
            let m = j.rem_euclid(2 * n);
            (if m < n { m } else { 2 * n - 1 - m }) as usize
        }
    }
}

/// Length of the approximation/detail output for an input of length `n`.
pub fn output_len(n: usize, ext: Extension) -> usize {
    match ext {
        Extension::Symmetric => (n + FILTER_LEN - 1) / 2,
        Extension::Periodic => n / 2,
    }
}

/// One analysis step: `(approximation, detail)`.
pub fn dwt_step(x: &[f64], ext: Extension) -> (Vec<f64>, Vec<f64>) {
    let hi = db6_dec_hi();
    let n = x.len();
    let len = output_len(n, ext);
    let mut approx = Vec::with_capacity(len);
    let mut detail = Vec::with_capacity(len);
    for i in 0..len {
        let (mut a, mut d) = (0.0, 0.0);
        for k in 0..FILTER_LEN {
            let v = x[extend_index(2 * i as isize + 1 - k as isize, n, ext)];
            a += DB6_DEC_LO[k] * v;
            d += hi[k] * v;
        }
        approx.push(a);
        detail.push(d);
    }
    (approx, detail)
}

/// Multilevel decomposition. Returns `[D1, D2, ..., Dlevels, Alevels]`.
pub fn dwt_decompose(x: &[f64], spec: &WaveletSpec) -> Result<Vec<Vec<f64>>> {
    if spec.levels == 0 {
        return Err(Error::Config("wavelet levels must be at least 1".into()));
    }
    if x.len() < spec.min_length() {
        return Err(Error::Data(format!(
            "signal of {} samples is too short for a {}-level db6 decomposition (need {})",
            x.len(),
            spec.levels,
            spec.min_length()
        )));
    }
    if spec.extension == Extension::Periodic && !x.len().is_multiple_of(1 << spec.levels) {
        return Err(Error::Data(format!(
            "periodic mode needs a length divisible by {}",
            1 << spec.levels
        )));
    }
    let mut bands = Vec::with_capacity(spec.levels + 1);
    let mut approx = x.to_vec();
    for _ in 0..spec.levels {
        let (a, d) = dwt_step(&approx, spec.extension);
        bands.push(d);
        approx = a;
    }
    bands.push(approx);
    Ok(bands)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_sums() {
        let lo: f64 = DB6_DEC_LO.iter().sum();
        let hi: f64 = db6_dec_hi().iter().sum();
        assert!((lo - std::f64::consts::SQRT_2).abs() < 1e-10);
        assert!(hi.abs() < 1e-10);
    }

    #[test]
    fn zeros_give_zeros() {
        let bands = dwt_decompose(&[0.0; 512], &WaveletSpec::default()).unwrap();
        assert_eq!(bands.len(), 4);
        assert!(bands.iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn symmetric_lengths() {
        let bands = dwt_decompose(&vec![1.0; 500], &WaveletSpec::default()).unwrap();
        let lens: Vec<usize> = bands.iter().map(Vec::len).collect();
        // 500 -> 255 -> 133 -> 72
        assert_eq!(lens, vec![255, 133, 72, 72]);
    }

    #[test]
    fn too_short_rejected() {
        assert!(matches!(dwt_decompose(&[1.0; 95], &WaveletSpec::default()), Err(Error::Data(_))));
    }

    // Reference values from PyWavelets `wavedec(x, 'db6', mode='symmetric', level=3)`
    // for x[t] = sin(0.3 t) + 0.5 cos(0.05 t^2) + 0.01 t, t = 0..128.
    #[test]
    fn matches_reference_symmetric_cascade() {
        let x: Vec<f64> = (0..128)
            .map(|t| {
                let t = t as f64;
                (0.3 * t).sin() + 0.5 * (0.05 * t * t).cos() + 0.01 * t
            })
            .collect();
        let b = dwt_decompose(&x, &WaveletSpec::default()).unwrap();
        let expect: [(usize, usize, [f64; 3], [f64; 2]); 4] = [
            (0, 69, [0.0472493025103757, -0.08027710230620574, 0.026042223079946743], [3.26564431679348e-05, 0.010938533569400662]),
            (1, 40, [0.4433007518155712, -0.38017543969902046, 0.10844170756571016], [-0.49269153671026383, -0.5904672637579367]),
            (2, 25, [0.03935176942965884, -0.18658574246359777, -0.9433651252452319], [-0.5484039380331556, 0.7326032929957332]),
            (3, 25, [2.5758682228100107, 2.451400665384556, 2.3949167395756468], [1.6738310109258854, 4.371745311713865]),
        ];
        for (band, len, head, tail) in expect {
            let c = &b[band];
            assert_eq!(c.len(), len);
            for (got, want) in c[..3].iter().zip(head).chain(c[len - 2..].iter().zip(tail)) {
                assert!((got - want).abs() < 1e-9, "band {band}: {got} vs {want}");
            }
        }
    }
}
