//! HTK mel scale and triangular filterbank.

use alloc::vec::Vec;

use super::{bin_frequencies, DspError};

/// `2595 * log10(1 + f / 700)`.
pub fn mel(f: f64) -> Result<f64, DspError> {
    if f < 0.0 {
        return Err(DspError::NegativeFrequency(f));
    }
    Ok(2595.0 * libm::log10(1.0 + f / 700.0))
}

/// Inverse of [`mel`].
pub fn mel_inv(m: f64) -> Result<f64, DspError> {
    if m < 0.0 {
        return Err(DspError::NegativeFrequency(m));
    }
    Ok(700.0 * (libm::pow(10.0, m / 2595.0) - 1.0))
}

/// `n_mels + 2` filter edge frequencies, equally spaced in mel.
pub fn mel_edges_hz(n_mels: usize, fmin: f64, fmax: f64) -> Result<Vec<f64>, DspError> {
    let (lo, hi) = (mel(fmin)?, mel(fmax)?);
    let step = (hi - lo) / (n_mels + 1) as f64;
    (0..n_mels + 2).map(|i| mel_inv(lo + step * i as f64)).collect()
}

/// Triangular filters over one-sided FFT bins, row-major `n_mels x n_bins`.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    pub n_mels: usize,
    pub n_bins: usize,
    pub edges_hz: Vec<f64>,
    pub weights: Vec<f64>,
}

impl MelFilterbank {
    pub fn filter(&self, m: usize) -> &[f64] {
        &self.weights[m * self.n_bins..(m + 1) * self.n_bins]
    }

    /// Peak (centre) frequency of filter `m`.
    pub fn centre_hz(&self, m: usize) -> f64 {
        self.edges_hz[m + 1]
    }

    /// Filter energies `W * power` for one frame.
    pub fn apply(&self, power: &[f64], out: &mut [f64]) {
        for (m, o) in out.iter_mut().enumerate() {
            *o = self.filter(m).iter().zip(power).map(|(w, p)| w * p).sum();
        }
    }
}

pub fn mel_filterbank(
    n_mels: usize,
    n_fft: usize,
    sample_rate: u32,
    fmin: f64,
    fmax: f64,
) -> Result<MelFilterbank, DspError> {
    let nyquist = f64::from(sample_rate) / 2.0;
    if !(fmin >= 0.0 && fmin < fmax && fmax <= nyquist) {
        return Err(DspError::InvalidRange { fmin, fmax, nyquist });
    }
    if n_mels == 0 {
        return Err(DspError::InvalidConfig("n_mels must be at least 1"));
    }
    if !n_fft.is_power_of_two() {
        return Err(DspError::NotPowerOfTwo(n_fft));
    }
    let edges = mel_edges_hz(n_mels, fmin, fmax)?;
    let freqs = bin_frequencies(n_fft, sample_rate);
    let n_bins = freqs.len();
    let mut weights = Vec::with_capacity(n_mels * n_bins);
    for m in 0..n_mels {
        let (lo, mid, hi) = (edges[m], edges[m + 1], edges[m + 2]);
        weights.extend(freqs.iter().map(|&f| {
            if f > lo && f <= mid {
                (f - lo) / (mid - lo)
            } else if f > mid && f < hi {
                (hi - f) / (hi - mid)
            } else {
                0.0
            }
        }));
    }
    Ok(MelFilterbank { n_mels, n_bins, edges_hz: edges, weights })
}
