//! Manifest-to-feature-matrix assembly, fanned out per file.

use std::path::Path;

use camocodec_core::dataset::{FeatureMatrix, Manifest, Split};
use camocodec_core::dsp::{mfcc, MfccConfig};
use camocodec_core::raster::{resize_bilinear, to_grayscale, GrayImage, RasterImage};
use camocodec_core::sonify::{encode_image, AudioClip, EncodeConfig};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::load_image;
use crate::manifest::resolve;

/// Grayscale, resized to the encoder grid, rendered to audio. Errors carry
/// `path` for context.
pub fn encode_raster(img: &RasterImage, encode: &EncodeConfig, seed: u64, path: &Path) -> Result<AudioClip> {
    let fitted = pixel_row(img, encode.rows, encode.cols).map_err(|source| Error::Raster { path: path.to_path_buf(), source })?;
    encode_image(&fitted, encode, seed).map_err(|source| Error::Encode { path: path.to_path_buf(), source })
}

/// Loads and encodes one manifest entry.
pub fn encode_entry(manifest_path: &Path, m: &Manifest, index: usize, encode: &EncodeConfig, seed: u64) -> Result<AudioClip> {
    let path = resolve(manifest_path, &m.entries[index]);
    encode_raster(&load_image(&path)?, encode, seed, &path)
}

fn mfcc_row(manifest_path: &Path, m: &Manifest, index: usize, encode: &EncodeConfig, cfg: &MfccConfig, seed: u64) -> Result<Vec<f64>> {
    let clip = encode_entry(manifest_path, m, index, encode, seed)?;
    let path = resolve(manifest_path, &m.entries[index]);
    Ok(mfcc(&clip, cfg).map_err(|source| Error::Mfcc { path, source })?.values)
}

/// Grayscale image resized to `height x width`.
pub fn pixel_row(img: &RasterImage, height: usize, width: usize) -> std::result::Result<GrayImage, camocodec_core::raster::RasterError> {
    resize_bilinear(&to_grayscale(img), height, width)
}

/// Runs `row` over every entry in parallel, places results by manifest index
/// and splits them into train and validation matrices. Class ids follow first
/// appearance in the manifest.
pub fn assemble<F>(m: &Manifest, dim: usize, row: F) -> Result<(FeatureMatrix, FeatureMatrix)>
where
    F: Fn(usize) -> Result<Vec<f64>> + Sync,
{
    let rows: Vec<Vec<f64>> = (0..m.entries.len()).into_par_iter().map(&row).collect::<Result<_>>()?;
    let names = m.class_names();
    let id = |label: &str| names.iter().position(|n| n == label).expect("label from manifest") as u32;
    let mut out = Vec::with_capacity(2);
    for split in [Split::Train, Split::Val] {
        let idx = m.split_indices(split);
        let mut data = Vec::with_capacity(idx.len() * dim);
        for &i in &idx {
            data.extend_from_slice(&rows[i]);
        }
        let labels = idx.iter().map(|&i| id(&m.entries[i].label)).collect();
        out.push(FeatureMatrix::new(dim, data, labels, names.clone())?);
    }
    let val = out.pop().expect("two splits");
    let train = out.pop().expect("two splits");
    Ok((train, val))
}

/// MFCC descriptor per manifest entry: load, grayscale, resize to the encoder
/// grid, encode, MFCC.
pub fn build_features(
    m: &Manifest,
    manifest_path: &Path,
    encode: &EncodeConfig,
    cfg: &MfccConfig,
    seed: u64,
) -> Result<(FeatureMatrix, FeatureMatrix)> {
    encode.validate()?;
    cfg.validate()?;
    assemble(m, cfg.target_dim, |i| mfcc_row(manifest_path, m, i, encode, cfg, seed))
}

/// Raw downscaled pixels per manifest entry, for the baseline classifier.
pub fn build_pixel_features(m: &Manifest, manifest_path: &Path, height: usize, width: usize) -> Result<(FeatureMatrix, FeatureMatrix)> {
    if height == 0 || width == 0 {
        return Err(Error::Invalid("baseline image size must be positive".into()));
    }
    assemble(m, height * width, |i| {
        let path = resolve(manifest_path, &m.entries[i]);
        let img = load_image(&path)?;
        let g = pixel_row(&img, height, width).map_err(|source| Error::Raster { path, source })?;
        Ok(g.into_data())
    })
}
