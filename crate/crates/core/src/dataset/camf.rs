//! CAMF: `"CAMF"`, version u32, n_samples u64, dim u64, class count u32,
//! length-prefixed (u32) UTF-8 class names, labels (u32 each), then the
//! row-major f64 payload. Little-endian throughout.

use alloc::string::String;
use alloc::vec::Vec;

use super::{DatasetError, FeatureMatrix};
use crate::bytes::{put_f64, put_u32, put_u64, Reader};

pub const CAMF_MAGIC: &[u8; 4] = b"CAMF";
pub const CAMF_VERSION: u32 = 1;

pub fn encode_features(x: &FeatureMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 + x.data().len() * 8 + x.n_samples() * 4);
    out.extend_from_slice(CAMF_MAGIC);
    put_u32(&mut out, CAMF_VERSION);
    put_u64(&mut out, x.n_samples() as u64);
    put_u64(&mut out, x.dim() as u64);
    put_u32(&mut out, x.class_names().len() as u32);
    for name in x.class_names() {
        put_u32(&mut out, name.len() as u32);
        out.extend_from_slice(name.as_bytes());
    }
    for &l in x.labels() {
        put_u32(&mut out, l);
    }
    for &v in x.data() {
        put_f64(&mut out, v);
    }
    out
}

pub fn decode_features(buf: &[u8]) -> Result<FeatureMatrix, DatasetError> {
    let mut r = Reader::new(buf);
    if r.take(4) != Some(CAMF_MAGIC.as_slice()) {
        return Err(DatasetError::BadMagic);
    }
    let version = r.u32().ok_or(DatasetError::Truncated("version"))?;
    if version != CAMF_VERSION {
        return Err(DatasetError::BadVersion(version));
    }
    let n = r.u64().ok_or(DatasetError::Truncated("sample count"))? as usize;
    let dim = r.u64().ok_or(DatasetError::Truncated("dimension"))? as usize;
    if dim == 0 {
        return Err(DatasetError::ZeroDim);
    }
    let n_classes = r.u32().ok_or(DatasetError::Truncated("class count"))? as usize;
    let mut names = Vec::with_capacity(n_classes.min(1024));
    for _ in 0..n_classes {
        let len = r.u32().ok_or(DatasetError::Truncated("class name length"))? as usize;
        let bytes = r.take(len).ok_or(DatasetError::Truncated("class name"))?;
        names.push(String::from(core::str::from_utf8(bytes).map_err(|_| DatasetError::BadClassName)?));
    }
    let expected = n
        .checked_mul(4 + dim * 8)
        .ok_or(DatasetError::PayloadLength { expected: usize::MAX, found: r.remaining() })?;
    if r.remaining() != expected {
        return Err(DatasetError::PayloadLength { expected, found: r.remaining() });
    }
    let labels: Vec<u32> = (0..n).filter_map(|_| r.u32()).collect();
    let data: Vec<f64> = (0..n * dim).filter_map(|_| r.f64()).collect();
    FeatureMatrix::new(dim, data, labels, names)
}
