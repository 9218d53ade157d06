//! Log mel-spectrogram and fixed-length MFCC descriptors.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::dct::dct_ii_matrix;
use super::{mel_filterbank, stft, DspError, MelFilterbank};
use crate::sonify::AudioClip;

/// Power floor applied before taking the logarithm.
pub const POWER_FLOOR: f64 = 1e-10;
/// `10 * log10(POWER_FLOOR)`.
pub const LOG_FLOOR_DB: f64 = -100.0;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default))]
pub struct MfccConfig {
    pub n_fft: usize,
    pub hop: usize,
    pub n_mels: usize,
    pub n_coeffs: usize,
    /// Descriptor length after truncation / zero padding.
    pub target_dim: usize,
    pub fmin: f64,
    /// Upper filterbank edge; `None` means the Nyquist frequency.
    pub fmax: Option<f64>,
}

impl Default for MfccConfig {
    fn default() -> Self {
        MfccConfig { n_fft: 1024, hop: 221, n_mels: 26, n_coeffs: 13, target_dim: 1228, fmin: 20.0, fmax: None }
    }
}

impl MfccConfig {
    pub fn validate(&self) -> Result<(), DspError> {
        if !self.n_fft.is_power_of_two() {
            return Err(DspError::NotPowerOfTwo(self.n_fft));
        }
        if self.hop == 0 {
            return Err(DspError::ZeroHop);
        }
        if self.n_mels == 0 {
            return Err(DspError::InvalidConfig("n_mels must be at least 1"));
        }
        if self.n_coeffs == 0 || self.n_coeffs > self.n_mels {
            return Err(DspError::InvalidConfig("n_coeffs must be in 1..=n_mels"));
        }
        if self.target_dim < self.n_coeffs {
            return Err(DspError::InvalidConfig("target_dim must be at least n_coeffs"));
        }
        Ok(())
    }

    pub fn fmax_for(&self, sample_rate: u32) -> f64 {
        self.fmax.unwrap_or(f64::from(sample_rate) / 2.0)
    }

    pub fn filterbank(&self, sample_rate: u32) -> Result<MelFilterbank, DspError> {
        self.validate()?;
        mel_filterbank(self.n_mels, self.n_fft, sample_rate, self.fmin, self.fmax_for(sample_rate))
    }
}

/// Log-power mel energies in dB, frame-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MelSpectrogram {
    pub n_frames: usize,
    pub n_mels: usize,
    pub values: Vec<f64>,
}

impl MelSpectrogram {
    pub fn frame(&self, j: usize) -> &[f64] {
        &self.values[j * self.n_mels..(j + 1) * self.n_mels]
    }
}

/// `10 * log10(max(W * |X|^2, 1e-10))` per frame and mel band.
pub fn mel_spectrogram(clip: &AudioClip, cfg: &MfccConfig) -> Result<MelSpectrogram, DspError> {
    let fb = cfg.filterbank(clip.sample_rate())?;
    let spec = stft(clip, cfg.n_fft, cfg.hop)?;
    let mut values = Vec::with_capacity(spec.n_frames * cfg.n_mels);
    let mut power = vec![0.0; spec.n_bins];
    let mut energies = vec![0.0; cfg.n_mels];
    for frame in spec.frames() {
        for (p, m) in power.iter_mut().zip(frame) {
            *p = m * m;
        }
        fb.apply(&power, &mut energies);
        values.extend(energies.iter().map(|&e| 10.0 * libm::log10(e.max(POWER_FLOOR))));
    }
    Ok(MelSpectrogram { n_frames: spec.n_frames, n_mels: cfg.n_mels, values })
}

/// Fixed-length cepstral descriptor of one clip.
#[derive(Debug, Clone, PartialEq)]
pub struct MfccDescriptor {
    pub values: Vec<f64>,
    pub source_id: String,
}

impl MfccDescriptor {
    pub fn with_source(mut self, id: impl Into<String>) -> Self {
        self.source_id = id.into();
        self
    }
}

/// First `n_coeffs` orthonormal DCT-II coefficients of every log-mel frame,
/// concatenated frame by frame, then truncated or zero-padded to `target_dim`.
pub fn mfcc(clip: &AudioClip, cfg: &MfccConfig) -> Result<MfccDescriptor, DspError> {
    let mel = mel_spectrogram(clip, cfg)?;
    let basis = dct_ii_matrix(cfg.n_mels, cfg.n_coeffs);
    let mut values = Vec::with_capacity(cfg.target_dim);
    'frames: for j in 0..mel.n_frames {
        let frame = mel.frame(j);
        for row in basis.chunks_exact(cfg.n_mels) {
            if values.len() == cfg.target_dim {
                break 'frames;
            }
            values.push(row.iter().zip(frame).map(|(b, v)| b * v).sum());
        }
    }
    values.resize(cfg.target_dim, 0.0);
    Ok(MfccDescriptor { values, source_id: String::new() })
}
