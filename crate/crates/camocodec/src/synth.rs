//! Synthetic fixtures: band-structured texture images and Gaussian blobs.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use camocodec_core::dataset::{FeatureMatrix, Manifest, ManifestEntry, Split};
use camocodec_core::raster::RasterImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::io::save_pgm;
use crate::manifest::save_manifest;

/// Stripe orientation of each texture class.
pub const TEXTURE_CLASSES: [&str; 3] = ["horizontal_bands", "vertical_bands", "diagonal_bands"];

#[derive(Debug, Clone, PartialEq)]
pub struct TextureSpec {
    pub size: usize,
    pub train_per_class: usize,
    pub val_per_class: usize,
    /// Uniform pixel noise amplitude in intensity units (0..1).
    pub noise: f64,
    pub seed: u64,
}

impl Default for TextureSpec {
    fn default() -> Self {
        TextureSpec { size: 64, train_per_class: 60, val_per_class: 20, noise: 0.15, seed: 0 }
    }
}

/// One `size x size` texture: a sinusoidal grating whose orientation depends
/// on `class`, with random period, phase and additive noise.
pub fn texture(class: usize, size: usize, noise: f64, rng: &mut ChaCha8Rng) -> RasterImage {
    let period = rng.random_range(6.0..12.0);
    let phase = rng.random_range(0.0..2.0 * PI);
    let mut data = Vec::with_capacity(size * size);
    for r in 0..size {
        for c in 0..size {
            let t = match class % 3 {
                0 => r as f64,
                1 => c as f64,
                _ => (r + c) as f64 / std::f64::consts::SQRT_2,
            };
            let v = 0.5 + 0.4 * (2.0 * PI * t / period + phase).sin() + rng.random_range(-noise..=noise);
            data.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
        }
    }
    RasterImage::new(size, size, 1, data).expect("non-empty texture")
}

/// Writes `images/<class>/<class>_<split>_<nnn>.pgm` under `dir` plus
/// `dir/manifest.csv` (paths relative to `dir`); returns the manifest path.
pub fn write_texture_dataset(dir: &Path, spec: &TextureSpec) -> Result<PathBuf> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut entries = Vec::new();
    for (class, name) in TEXTURE_CLASSES.iter().enumerate() {
        for (split, count) in [(Split::Train, spec.train_per_class), (Split::Val, spec.val_per_class)] {
            for i in 0..count {
                let rel = format!("images/{name}/{name}_{}_{i:03}.pgm", split.as_str());
                save_pgm(&texture(class, spec.size, spec.noise, &mut rng), &dir.join(&rel))?;
                entries.push(ManifestEntry { path: rel, label: (*name).to_string(), split });
            }
        }
    }
    let path = dir.join("manifest.csv");
    save_manifest(&Manifest { entries }, &path)?;
    Ok(path)
}

/// Isotropic unit-variance Gaussian classes whose means sit on scaled basis
/// vectors, `separation` standard deviations apart pairwise.
pub fn gaussian_blobs(n_classes: usize, per_class: usize, dim: usize, separation: f64, seed: u64) -> FeatureMatrix {
    assert!(n_classes <= dim, "one basis direction per class");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit sigma");
    let offset = separation / std::f64::consts::SQRT_2;
    let mut data = Vec::with_capacity(n_classes * per_class * dim);
    let mut labels = Vec::with_capacity(n_classes * per_class);
    for i in 0..n_classes * per_class {
        let c = i % n_classes;
        let start = data.len();
        data.extend((0..dim).map(|_| normal.sample(&mut rng)));
        data[start + c] += offset;
        labels.push(c as u32);
    }
    let names = (0..n_classes).map(|c| format!("blob_{c}")).collect();
    FeatureMatrix::new(dim, data, labels, names).expect("consistent blob shapes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blob_means_are_separated() {
        let x = gaussian_blobs(3, 200, 20, 6.0, 1);
        let mut means = vec![vec![0.0; 20]; 3];
        for (row, &l) in x.rows().zip(x.labels()) {
            for (m, v) in means[l as usize].iter_mut().zip(row) {
                *m += v / 200.0;
            }
        }
        let d: f64 = means[0].iter().zip(&means[1]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        assert!((d - 6.0).abs() < 0.8, "{d}");
    }

    #[test]
    fn textures_are_seeded() {
        let a = texture(1, 16, 0.1, &mut ChaCha8Rng::seed_from_u64(3));
        let b = texture(1, 16, 0.1, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }
}
