//! Canonical 44-byte-header PCM WAV: mono, 16-bit, little-endian.

use alloc::vec::Vec;

use thiserror::Error;

use super::AudioClip;
use crate::bytes::{put_u32, Reader};

pub const WAV_HEADER_LEN: usize = 44;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WavError {
    #[error("not a RIFF/WAVE file")]
    BadMagic,
    #[error("unsupported format code {0} (only PCM = 1)")]
    UnsupportedFormat(u16),
    #[error("unsupported channel count {0} (only mono)")]
    UnsupportedChannels(u16),
    #[error("unsupported bit depth {0} (only 16)")]
    UnsupportedBitDepth(u16),
    #[error("missing {0} chunk")]
    MissingChunk(&'static str),
    #[error("truncated {chunk} chunk: declared {declared} bytes, {available} available")]
    Truncated { chunk: &'static str, declared: usize, available: usize },
    #[error("sample rate must be positive")]
    ZeroSampleRate,
}

/// `round(s * 32767)` clamped to the i16 range.
pub fn quantize(s: f64) -> i16 {
    libm::round(s * 32767.0).clamp(-32768.0, 32767.0) as i16
}

/// `q / 32767` clamped to `[-1, 1]`.
pub fn dequantize(q: i16) -> f64 {
    (f64::from(q) / 32767.0).clamp(-1.0, 1.0)
}

pub fn encode_wav(clip: &AudioClip) -> Vec<u8> {
    let data_len = clip.len() * 2;
    let mut out = Vec::with_capacity(WAV_HEADER_LEN + data_len);
    out.extend_from_slice(b"RIFF");
    put_u32(&mut out, (36 + data_len) as u32);
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    put_u32(&mut out, 16);
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    put_u32(&mut out, clip.sample_rate());
    put_u32(&mut out, clip.sample_rate() * 2);
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    put_u32(&mut out, data_len as u32);
    for &s in clip.samples() {
        out.extend_from_slice(&quantize(s).to_le_bytes());
    }
    out
}

/// Parses a mono 16-bit PCM WAV. Chunks other than `fmt ` and `data` are
/// skipped.
pub fn decode_wav(buf: &[u8]) -> Result<AudioClip, WavError> {
    let mut r = Reader::new(buf);
    if r.take(4) != Some(b"RIFF".as_slice()) {
        return Err(WavError::BadMagic);
    }
    r.u32().ok_or(WavError::BadMagic)?;
    if r.take(4) != Some(b"WAVE".as_slice()) {
        return Err(WavError::BadMagic);
    }
    let mut sample_rate = None;
    loop {
        let Some(id) = r.take(4) else {
            return Err(if sample_rate.is_none() { WavError::MissingChunk("fmt ") } else { WavError::MissingChunk("data") });
        };
        let size = r.u32().ok_or(WavError::Truncated { chunk: "header", declared: 4, available: 0 })? as usize;
        match id {
            b"fmt " => {
                if size < 16 || r.remaining() < size {
                    return Err(WavError::Truncated { chunk: "fmt ", declared: size, available: r.remaining() });
                }
                let mut f = Reader::new(r.take(size).unwrap_or_default());
                let format = f.u16().unwrap_or(0);
                let channels = f.u16().unwrap_or(0);
                let rate = f.u32().unwrap_or(0);
                let _byte_rate = f.u32();
                let _align = f.u16();
                let bits = f.u16().unwrap_or(0);
                if format != 1 {
                    return Err(WavError::UnsupportedFormat(format));
                }
                if channels != 1 {
                    return Err(WavError::UnsupportedChannels(channels));
                }
                if bits != 16 {
                    return Err(WavError::UnsupportedBitDepth(bits));
                }
                if rate == 0 {
                    return Err(WavError::ZeroSampleRate);
                }
                sample_rate = Some(rate);
            }
            b"data" => {
                let rate = sample_rate.ok_or(WavError::MissingChunk("fmt "))?;
                if r.remaining() < size {
                    return Err(WavError::Truncated { chunk: "data", declared: size, available: r.remaining() });
                }
                let payload = r.take(size).unwrap_or_default();
                let samples = payload
                    .chunks_exact(2)
                    .map(|b| dequantize(i16::from_le_bytes([b[0], b[1]])))
                    .collect();
                return AudioClip::new(rate, samples).map_err(|_| WavError::ZeroSampleRate);
            }
            _ => {
                // chunks are padded to even length
                let skip = size + (size & 1);
                if r.take(skip.min(r.remaining())).is_none() {
                    return Err(WavError::Truncated { chunk: "unknown", declared: size, available: r.remaining() });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn one_second_of_silence_is_44144_bytes() {
        let clip = AudioClip::new(22050, vec![0.0; 22050]).unwrap();
        let bytes = encode_wav(&clip);
        assert_eq!(bytes.len(), 44_144);
        assert_eq!(&bytes[0..4], b"RIFF");
        assert_eq!(u32::from_le_bytes([bytes[4], bytes[5], bytes[6], bytes[7]]), 36 + 44_100);
        assert_eq!(&bytes[36..40], b"data");
    }

    #[test]
    fn full_scale_mapping() {
        assert_eq!(quantize(1.0), 32767);
        assert_eq!(quantize(-1.0), -32767);
        assert_eq!(quantize(0.0), 0);
        assert_eq!(dequantize(-32768), -1.0);
    }

    #[test]
    fn rejects_bad_files() {
        assert_eq!(decode_wav(b"RIFX0000WAVE"), Err(WavError::BadMagic));
        let clip = AudioClip::new(8000, vec![0.1; 10]).unwrap();
        let mut bytes = encode_wav(&clip);
        let mut stereo = bytes.clone();
        stereo[22] = 2;
        assert_eq!(decode_wav(&stereo), Err(WavError::UnsupportedChannels(2)));
        let mut float = bytes.clone();
        float[20] = 3;
        assert_eq!(decode_wav(&float), Err(WavError::UnsupportedFormat(3)));
        let mut eight = bytes.clone();
        eight[34] = 8;
        assert_eq!(decode_wav(&eight), Err(WavError::UnsupportedBitDepth(8)));
        bytes.truncate(50);
        assert!(matches!(decode_wav(&bytes), Err(WavError::Truncated { chunk: "data", .. })));
    }

    proptest! {
        #[test]
        fn write_read_is_within_one_step(samples in proptest::collection::vec(-1.0f64..=1.0, 0..300)) {
            let clip = AudioClip::new(22050, samples.clone()).unwrap();
            let back = decode_wav(&encode_wav(&clip)).unwrap();
            prop_assert_eq!(back.sample_rate(), 22050);
            for (a, b) in samples.iter().zip(back.samples()) {
                prop_assert!((a - b).abs() <= 1.0 / 32767.0);
                prop_assert_eq!(quantize(*a), quantize(*b));
            }
            // quantize -> write -> read -> quantize is idempotent
            prop_assert_eq!(encode_wav(&back), encode_wav(&clip));
        }
    }
}
