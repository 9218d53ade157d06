//! File wrappers around the in-memory codecs of `camocodec-core`.

use std::fs;
use std::path::Path;

use camocodec_core::dataset::{decode_features, encode_features, FeatureMatrix};
use camocodec_core::dnn::{decode_model, encode_model, DenseNet};
use camocodec_core::raster::{decode_pnm, encode_pgm, RasterImage};
use camocodec_core::sonify::{decode_wav, encode_wav, AudioClip};

use crate::error::{Error, Result};

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Writes `bytes`, creating parent directories as needed.
pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn load_image(path: &Path) -> Result<RasterImage> {
    decode_pnm(&read_bytes(path)?).map_err(|source| Error::Raster { path: path.to_path_buf(), source })
}

/// Writes the single-channel (or luma) bytes of `img` as P5.
pub fn save_pgm(img: &RasterImage, path: &Path) -> Result<()> {
    write_bytes(path, &encode_pgm(img))
}

pub fn load_wav(path: &Path) -> Result<AudioClip> {
    decode_wav(&read_bytes(path)?).map_err(|source| Error::Wav { path: path.to_path_buf(), source })
}

pub fn save_wav(clip: &AudioClip, path: &Path) -> Result<()> {
    write_bytes(path, &encode_wav(clip))
}

pub fn load_features(path: &Path) -> Result<FeatureMatrix> {
    decode_features(&read_bytes(path)?).map_err(|source| Error::Features { path: path.to_path_buf(), source })
}

pub fn save_features(x: &FeatureMatrix, path: &Path) -> Result<()> {
    write_bytes(path, &encode_features(x))
}

pub fn load_model(path: &Path) -> Result<DenseNet> {
    decode_model(&read_bytes(path)?).map_err(|source| Error::Model { path: path.to_path_buf(), source })
}

pub fn save_model(net: &DenseNet, path: &Path) -> Result<()> {
    write_bytes(path, &encode_model(net))
}
