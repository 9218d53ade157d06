//! Image camouflage as audio: every image row drives one sine oscillator, so
//! the clip's short-time spectrum redraws the image.

mod wav;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::dsp::{stft_windowed, DspError};
use crate::raster::GrayImage;
use crate::stats::pearson;

pub use wav::{decode_wav, dequantize, encode_wav, quantize, WavError, WAV_HEADER_LEN};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SonifyError {
    #[error("invalid encode configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("image is {found_rows}x{found_cols}, encoder grid is {rows}x{cols}")]
    DimensionMismatch { rows: usize, cols: usize, found_rows: usize, found_cols: usize },
    #[error("clip has {len} samples, shorter than one {frame}-sample frame")]
    TooShort { len: usize, frame: usize },
    #[error("sample {0} outside [-1, 1]")]
    SampleOutOfRange(f64),
    #[error("sample rate must be positive")]
    ZeroSampleRate,
    #[error(transparent)]
    Dsp(#[from] DspError),
}

/// Mono clip with samples in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    sample_rate: u32,
    samples: Vec<f64>,
}

impl AudioClip {
    pub fn new(sample_rate: u32, samples: Vec<f64>) -> Result<Self, SonifyError> {
        if sample_rate == 0 {
            return Err(SonifyError::ZeroSampleRate);
        }
        if let Some(&s) = samples.iter().find(|s| !(s.abs() <= 1.0)) {
            return Err(SonifyError::SampleOutOfRange(s));
        }
        Ok(AudioClip { sample_rate, samples })
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default))]
pub struct EncodeConfig {
    /// Frequency lines (image rows).
    pub rows: usize,
    /// Time frames (image columns).
    pub cols: usize,
    /// Duration of one image column.
    pub frame_seconds: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub sample_rate: u32,
    /// Peak absolute amplitude of the rendered clip.
    pub peak: f64,
}

impl Default for EncodeConfig {
    fn default() -> Self {
        EncodeConfig {
            rows: 128,
            cols: 128,
            frame_seconds: 0.030,
            f_min: 200.0,
            f_max: 8000.0,
            sample_rate: 22050,
            peak: 0.89,
        }
    }
}

impl EncodeConfig {
    pub fn validate(&self) -> Result<(), SonifyError> {
        if self.sample_rate == 0 {
            return Err(SonifyError::ZeroSampleRate);
        }
        let nyquist = f64::from(self.sample_rate) / 2.0;
        if !(self.f_min > 0.0 && self.f_min < self.f_max && self.f_max < nyquist) {
            return Err(SonifyError::InvalidConfig("need 0 < f_min < f_max < sample_rate / 2"));
        }
        if self.rows < 2 {
            return Err(SonifyError::InvalidConfig("rows must be at least 2"));
        }
        if self.cols == 0 {
            return Err(SonifyError::InvalidConfig("cols must be at least 1"));
        }
        if !(self.frame_seconds > 0.0) || self.frame_len() == 0 {
            return Err(SonifyError::InvalidConfig("frame must span at least one sample"));
        }
        if !(self.peak > 0.0 && self.peak <= 1.0) {
            return Err(SonifyError::InvalidConfig("peak must be in (0, 1]"));
        }
        Ok(())
    }

    /// Samples per image column, `round(frame_seconds * sample_rate)`.
    pub fn frame_len(&self) -> usize {
        libm::round(self.frame_seconds * f64::from(self.sample_rate)) as usize
    }

    pub fn total_samples(&self) -> usize {
        self.cols * self.frame_len()
    }
}

/// Oscillator frequency per image row, linearly spaced from `f_max` (row 0,
/// the top of the image) down to `f_min`.
pub fn row_frequencies(cfg: &EncodeConfig) -> Vec<f64> {
    let step = (cfg.f_max - cfg.f_min) / (cfg.rows - 1) as f64;
    (0..cfg.rows).map(|r| cfg.f_max - r as f64 * step).collect()
}

fn check_grid(img: &GrayImage, cfg: &EncodeConfig) -> Result<(), SonifyError> {
    if img.height() != cfg.rows || img.width() != cfg.cols {
        return Err(SonifyError::DimensionMismatch {
            rows: cfg.rows,
            cols: cfg.cols,
            found_rows: img.height(),
            found_cols: img.width(),
        });
    }
    Ok(())
}

/// Additive synthesis before peak normalization.
///
/// Row `r` contributes `(pixel / rows) * sin(2 pi f_r n / sample_rate)` over
/// the samples `n` of each column's frame. The phase is a function of the
/// global sample index, so oscillators never reset at frame boundaries.
pub fn synthesize(img: &GrayImage, cfg: &EncodeConfig) -> Result<Vec<f64>, SonifyError> {
    cfg.validate()?;
    check_grid(img, cfg)?;
    let frame = cfg.frame_len();
    let freqs = row_frequencies(cfg);
    let sr = f64::from(cfg.sample_rate);
    let incs: Vec<f64> = freqs.iter().map(|f| 2.0 * PI * f / sr).collect();
    let steps: Vec<(f64, f64)> = incs.iter().map(|&w| (libm::cos(w), libm::sin(w))).collect();
    let mut out = vec![0.0; cfg.total_samples()];
    let norm = cfg.rows as f64;
    for (t, chunk) in out.chunks_exact_mut(frame).enumerate() {
        let n0 = (t * frame) as f64;
        for r in 0..cfg.rows {
            let amp = img.get(r, t) / norm;
            if amp == 0.0 {
                continue;
            }
            // rotate the phasor from an exactly evaluated frame-start phase
            let phase = incs[r] * n0;
            let (mut c, mut s) = (libm::cos(phase), libm::sin(phase));
            let (cw, sw) = steps[r];
            for x in chunk.iter_mut() {
                *x += amp * s;
                let nc = c * cw - s * sw;
                s = s * cw + c * sw;
                c = nc;
            }
        }
    }
    Ok(out)
}

/// Renders `img` as an audio clip whose loudest sample has magnitude
/// `cfg.peak` (all-zero images stay silent).
///
/// `seed` is accepted for interface stability; the synthesis is
/// deterministic and does not consume it.
pub fn encode_image(img: &GrayImage, cfg: &EncodeConfig, seed: u64) -> Result<AudioClip, SonifyError> {
    let _ = seed;
    let mut samples = synthesize(img, cfg)?;
    let max = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if max > 0.0 {
        for s in samples.iter_mut() {
            *s = (*s / max) * cfg.peak;
        }
    }
    AudioClip::new(cfg.sample_rate, samples)
}

/// Reads the image back from the clip's magnitude spectrogram.
///
/// One frame per image column (window = hop = frame length, Hann, zero-padded
/// to the next power of two), sampled at the FFT bin nearest each row's
/// oscillator frequency, then min-max normalized. A constant result maps to
/// all zeros.
pub fn decode_spectrogram(clip: &AudioClip, cfg: &EncodeConfig) -> Result<GrayImage, SonifyError> {
    cfg.validate()?;
    let frame = cfg.frame_len();
    if clip.len() < frame {
        return Err(SonifyError::TooShort { len: clip.len(), frame });
    }
    let n_fft = frame.next_power_of_two();
    let spec = stft_windowed(clip, n_fft, frame, frame)?;
    let sr = f64::from(clip.sample_rate());
    let bins: Vec<usize> = row_frequencies(cfg)
        .iter()
        .map(|f| (libm::round(f * n_fft as f64 / sr) as usize).min(spec.n_bins - 1))
        .collect();
    let (rows, cols) = (cfg.rows, spec.n_frames);
    let mut data = vec![0.0; rows * cols];
    for t in 0..cols {
        let mags = spec.frame(t);
        for (r, &k) in bins.iter().enumerate() {
            data[r * cols + t] = mags[k];
        }
    }
    let lo = data.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        for v in data.iter_mut() {
            *v = ((*v - lo) / (hi - lo)).clamp(0.0, 1.0);
        }
    } else {
        data.iter_mut().for_each(|v| *v = 0.0);
    }
    GrayImage::new(cols, rows, data).map_err(|_| SonifyError::InvalidConfig("decoded image is empty"))
}

/// Pearson correlation between `img` and its encode/decode round trip.
pub fn roundtrip_fidelity(img: &GrayImage, cfg: &EncodeConfig, seed: u64) -> Result<f64, SonifyError> {
    let clip = encode_image(img, cfg, seed)?;
    let back = decode_spectrogram(&clip, cfg)?;
    Ok(pearson(img.data(), back.data()))
}
