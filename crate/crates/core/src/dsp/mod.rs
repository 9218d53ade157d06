//! Spectral analysis: STFT, mel filterbank, mel-spectrogram, DCT-II, MFCC
//! descriptors and spectral centroid.

mod dct;
mod fft;
mod mel;
mod mfcc;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::sonify::AudioClip;

pub use dct::{dct_ii, dct_iii};
pub use fft::FftPlan;
pub use mel::{mel, mel_edges_hz, mel_filterbank, mel_inv, MelFilterbank};
pub use mfcc::{mel_spectrogram, mfcc, MelSpectrogram, MfccConfig, MfccDescriptor, LOG_FLOOR_DB, POWER_FLOOR};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DspError {
    #[error("audio clip is empty")]
    EmptyClip,
    #[error("FFT size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("hop must be at least 1")]
    ZeroHop,
    #[error("window length {win} must be between 1 and the FFT size {n_fft}")]
    BadWindow { win: usize, n_fft: usize },
    #[error("frequency {0} Hz is negative")]
    NegativeFrequency(f64),
    #[error("invalid frequency range {fmin}..{fmax} Hz (Nyquist {nyquist} Hz)")]
    InvalidRange { fmin: f64, fmax: f64, nyquist: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("input vector is empty")]
    EmptyInput,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Magnitude short-time spectrum, frame-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub n_frames: usize,
    pub n_bins: usize,
    pub n_fft: usize,
    pub sample_rate: u32,
    pub hop: usize,
    pub magnitudes: Vec<f64>,
}

impl Spectrogram {
    pub fn frame(&self, j: usize) -> &[f64] {
        &self.magnitudes[j * self.n_bins..(j + 1) * self.n_bins]
    }

    pub fn frames(&self) -> impl Iterator<Item = &[f64]> {
        self.magnitudes.chunks_exact(self.n_bins)
    }

    pub fn bin_frequencies(&self) -> Vec<f64> {
        bin_frequencies(self.n_fft, self.sample_rate)
    }
}

/// Centre frequency of each one-sided DFT bin.
pub fn bin_frequencies(n_fft: usize, sample_rate: u32) -> Vec<f64> {
    (0..=n_fft / 2)
        .map(|k| k as f64 * f64::from(sample_rate) / n_fft as f64)
        .collect()
}

/// Periodic Hann window.
pub fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| 0.5 - 0.5 * libm::cos(2.0 * PI * i as f64 / len as f64))
        .collect()
}

/// Frame count for `len` samples at `hop`: `floor((len - 1) / hop) + 1`.
pub fn frame_count(len: usize, hop: usize) -> usize {
    (len - 1) / hop + 1
}

/// STFT with a Hann window spanning the whole FFT.
pub fn stft(clip: &AudioClip, n_fft: usize, hop: usize) -> Result<Spectrogram, DspError> {
    stft_windowed(clip, n_fft, n_fft, hop)
}

/// STFT with a Hann window of `win_length <= n_fft` samples, zero-padded to
/// `n_fft` before the transform. Frames start at multiples of `hop`; the last
/// frame is zero-padded past the end of the clip.
pub fn stft_windowed(clip: &AudioClip, n_fft: usize, win_length: usize, hop: usize) -> Result<Spectrogram, DspError> {
    if !n_fft.is_power_of_two() {
        return Err(DspError::NotPowerOfTwo(n_fft));
    }
    if hop == 0 {
        return Err(DspError::ZeroHop);
    }
    if win_length == 0 || win_length > n_fft {
        return Err(DspError::BadWindow { win: win_length, n_fft });
    }
    let samples = clip.samples();
    if samples.is_empty() {
        return Err(DspError::EmptyClip);
    }
    let plan = FftPlan::new(n_fft);
    let window = hann(win_length);
    let n_frames = frame_count(samples.len(), hop);
    let n_bins = n_fft / 2 + 1;
    let mut magnitudes = Vec::with_capacity(n_frames * n_bins);
    let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
    for j in 0..n_frames {
        let start = j * hop;
        for (i, slot) in buf.iter_mut().enumerate() {
            let v = if i < win_length { samples.get(start + i).map_or(0.0, |&s| s * window[i]) } else { 0.0 };
            *slot = Complex64::new(v, 0.0);
        }
        plan.forward(&mut buf);
        magnitudes.extend(buf[..n_bins].iter().map(|c| c.norm()));
    }
    Ok(Spectrogram { n_frames, n_bins, n_fft, sample_rate: clip.sample_rate(), hop, magnitudes })
}

/// Magnitude-weighted mean frequency of one spectrum frame; 0 for silence.
pub fn spectral_centroid(magnitudes: &[f64], bin_freqs: &[f64]) -> Result<f64, DspError> {
    if magnitudes.len() != bin_freqs.len() {
        return Err(DspError::LengthMismatch(magnitudes.len(), bin_freqs.len()));
    }
    let total: f64 = magnitudes.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(magnitudes.iter().zip(bin_freqs).map(|(m, f)| m * f).sum::<f64>() / total)
}
