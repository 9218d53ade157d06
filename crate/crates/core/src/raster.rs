//! Raster images: binary PGM/PPM codec, grayscale conversion and resizing.

use alloc::format;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RasterError {
    #[error("unsupported magic number {0:?} (expected P5 or P6)")]
    UnsupportedMagic([u8; 2]),
    #[error("malformed header: {0}")]
    MalformedHeader(&'static str),
    #[error("unsupported maxval {0} (only 255 is accepted)")]
    UnsupportedMaxval(u32),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("channel count must be 1 or 3, got {0}")]
    BadChannels(usize),
    #[error("data length {found} does not match {expected}")]
    DataLength { expected: usize, found: usize },
    #[error("intensity {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("resize target must be at least 1x1, got {height}x{width}")]
    ZeroTarget { height: usize, width: usize },
}

/// 8-bit raster with 1 (gray) or 3 (RGB) interleaved channels, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::ZeroDimension { width, height });
        }
        if channels != 1 && channels != 3 {
            return Err(RasterError::BadChannels(channels));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(RasterError::DataLength { expected, found: data.len() });
        }
        Ok(RasterImage { width, height, channels, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }
}

/// Single-channel image with intensities in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::ZeroDimension { width, height });
        }
        if data.len() != width * height {
            return Err(RasterError::DataLength { expected: width * height, found: data.len() });
        }
        if let Some(&bad) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(RasterError::OutOfRange(bad));
        }
        Ok(GrayImage { width, height, data })
    }

    /// Image filled with a single intensity.
    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, RasterError> {
        Self::new(width, height, alloc::vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    /// Quantizes to an 8-bit single-channel raster (`round(v * 255)`).
    pub fn to_raster(&self) -> RasterImage {
        let data = self
            .data
            .iter()
            .map(|&v| libm::round(v * 255.0).clamp(0.0, 255.0) as u8)
            .collect();
        RasterImage { width: self.width, height: self.height, channels: 1, data }
    }
}

fn is_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c)
}

fn header_number(buf: &[u8], pos: &mut usize) -> Result<u32, RasterError> {
    while *pos < buf.len() && is_space(buf[*pos]) {
        *pos += 1;
    }
    let start = *pos;
    while *pos < buf.len() && buf[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return Err(RasterError::MalformedHeader("expected a decimal number"));
    }
    let mut value: u32 = 0;
    for &d in &buf[start..*pos] {
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add(u32::from(d - b'0')))
            .ok_or(RasterError::MalformedHeader("number overflows"))?;
    }
    Ok(value)
}

/// Decodes a binary PGM (`P5`) or PPM (`P6`) file with maxval 255.
pub fn decode_pnm(buf: &[u8]) -> Result<RasterImage, RasterError> {
    if buf.len() < 2 {
        return Err(RasterError::MalformedHeader("file shorter than magic number"));
    }
    let magic = [buf[0], buf[1]];
    let channels = match &magic {
        b"P5" => 1,
        b"P6" => 3,
        _ => return Err(RasterError::UnsupportedMagic(magic)),
    };
    let mut pos = 2;
    if pos >= buf.len() || !is_space(buf[pos]) {
        return Err(RasterError::MalformedHeader("missing whitespace after magic"));
    }
    let width = header_number(buf, &mut pos)? as usize;
    let height = header_number(buf, &mut pos)? as usize;
    let maxval = header_number(buf, &mut pos)?;
    if maxval != 255 {
        return Err(RasterError::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates maxval from the raster
    if pos >= buf.len() || !is_space(buf[pos]) {
        return Err(RasterError::MalformedHeader("missing whitespace after maxval"));
    }
    pos += 1;
    if width == 0 || height == 0 {
        return Err(RasterError::ZeroDimension { width, height });
    }
    let expected = width * height * channels;
    let payload = &buf[pos..];
    if payload.len() < expected {
        return Err(RasterError::Truncated { expected, found: payload.len() });
    }
    RasterImage::new(width, height, channels, payload[..expected].to_vec())
}

fn encode_pnm(magic: &str, img: &RasterImage) -> Vec<u8> {
    let header = format!("{}\n{} {}\n255\n", magic, img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.data.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&img.data);
    out
}

/// Encodes as binary PGM with header `"P5\n<w> <h>\n255\n"`.
///
/// Three-channel images are reduced with [`to_grayscale`] first.
pub fn encode_pgm(img: &RasterImage) -> Vec<u8> {
    if img.channels == 1 {
        encode_pnm("P5", img)
    } else {
        encode_pnm("P5", &to_grayscale(img).to_raster())
    }
}

/// Encodes a three-channel image as binary PPM (`P6`).
pub fn encode_ppm(img: &RasterImage) -> Vec<u8> {
    if img.channels == 3 {
        return encode_pnm("P6", img);
    }
    let data = img.data.iter().flat_map(|&v| [v, v, v]).collect();
    encode_pnm("P6", &RasterImage { width: img.width, height: img.height, channels: 3, data })
}

const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

/// BT.601 luma for RGB, plain scaling for single-channel input.
pub fn to_grayscale(img: &RasterImage) -> GrayImage {
    let data = match img.channels {
        1 => img.data.iter().map(|&v| f64::from(v) / 255.0).collect(),
        _ => img
            .data
            .chunks_exact(3)
            .map(|px| {
                let y = LUMA[0] * f64::from(px[0]) + LUMA[1] * f64::from(px[1]) + LUMA[2] * f64::from(px[2]);
                (y / 255.0).clamp(0.0, 1.0)
            })
            .collect(),
    };
    GrayImage { width: img.width, height: img.height, data }
}

/// Interpolates between `a` and `b`, never leaving `[min(a,b), max(a,b)]`.
#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    let v = a + t * (b - a);
    v.clamp(a.min(b), a.max(b))
}

/// Source coordinate and blend weight for corner-aligned sampling.
#[inline]
fn sample_axis(i: usize, out_len: usize, in_len: usize) -> (usize, usize, f64) {
    if out_len == 1 || in_len == 1 {
        return (0, 0, 0.0);
    }
    let pos = i as f64 * (in_len - 1) as f64 / (out_len - 1) as f64;
    let lo = (libm::floor(pos) as usize).min(in_len - 1);
    let hi = (lo + 1).min(in_len - 1);
    (lo, hi, pos - lo as f64)
}

/// Bilinear resize with corner-aligned sampling (output corners coincide with
/// input corners).
pub fn resize_bilinear(img: &GrayImage, out_h: usize, out_w: usize) -> Result<GrayImage, RasterError> {
    if out_h == 0 || out_w == 0 {
        return Err(RasterError::ZeroTarget { height: out_h, width: out_w });
    }
    if out_h == img.height && out_w == img.width {
        return Ok(img.clone());
    }
    let cols: Vec<_> = (0..out_w).map(|x| sample_axis(x, out_w, img.width)).collect();
    let mut data = Vec::with_capacity(out_h * out_w);
    for y in 0..out_h {
        let (y0, y1, ty) = sample_axis(y, out_h, img.height);
        for &(x0, x1, tx) in &cols {
            let top = lerp(img.get(y0, x0), img.get(y0, x1), tx);
            let bottom = lerp(img.get(y1, x0), img.get(y1, x1), tx);
            data.push(lerp(top, bottom, ty));
        }
    }
    Ok(GrayImage { width: out_w, height: out_h, data })
}
