//! Labeled feature matrices, manifests, class balance, PCA and the CAMF
//! feature file format.

mod camf;
mod pca;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

pub use camf::{decode_features, encode_features, CAMF_MAGIC, CAMF_VERSION};
pub use pca::{pca_fit, pca_transform, PcaModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("row {row} has length {found}, expected {expected}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: u32, n_classes: usize },
    #[error("feature dimension must be positive")]
    ZeroDim,
    #[error("{rows} rows but {labels} labels")]
    LabelCount { rows: usize, labels: usize },
    #[error("PCA needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("k = {k} exceeds min(n_samples, dim) = {max}")]
    TooManyComponents { k: usize, max: usize },
    #[error("dimension mismatch: model expects {expected}, data has {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("bad magic number (expected CAMF)")]
    BadMagic,
    #[error("unsupported CAMF version {0}")]
    BadVersion(u32),
    #[error("truncated file: {0}")]
    Truncated(&'static str),
    #[error("payload length {found} bytes, header implies {expected}")]
    PayloadLength { expected: usize, found: usize },
    #[error("class name is not valid UTF-8")]
    BadClassName,
}

/// Stacked fixed-length feature rows with integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    dim: usize,
    data: Vec<f64>,
    labels: Vec<u32>,
    class_names: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(dim: usize, data: Vec<f64>, labels: Vec<u32>, class_names: Vec<String>) -> Result<Self, DatasetError> {
        if dim == 0 {
            return Err(DatasetError::ZeroDim);
        }
        if !data.len().is_multiple_of(dim) {
            return Err(DatasetError::RowLength { row: data.len() / dim, expected: dim, found: data.len() % dim });
        }
        if data.len() / dim != labels.len() {
            return Err(DatasetError::LabelCount { rows: data.len() / dim, labels: labels.len() });
        }
        if let Some(&label) = labels.iter().find(|&&l| l as usize >= class_names.len()) {
            return Err(DatasetError::LabelOutOfRange { label, n_classes: class_names.len() });
        }
        Ok(FeatureMatrix { dim, data, labels, class_names })
    }

    /// Builds from per-row vectors, checking every row against the first.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<u32>, class_names: Vec<String>) -> Result<Self, DatasetError> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(dim * rows.len());
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(DatasetError::RowLength { row: i, expected: dim, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::new(dim, data, labels, class_names)
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Row-major payload.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn label_ids(&self) -> Vec<usize> {
        self.labels.iter().map(|&l| l as usize).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Split {
    Train,
    Val,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
        }
    }

    pub fn parse(token: &str) -> Option<Split> {
        match token {
            "train" => Some(Split::Train),
            "val" => Some(Split::Val),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub label: String,
    pub split: Split,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    /// Class names in order of first appearance.
    pub fn class_names(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for e in &self.entries {
            if !names.contains(&e.label) {
                names.push(e.label.clone());
            }
        }
        names
    }

    /// Indices of entries belonging to `split`, in manifest order.
    pub fn split_indices(&self, split: Split) -> Vec<usize> {
        (0..self.entries.len()).filter(|&i| self.entries[i].split == split).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassBalance {
    /// `(label, train count, val count)` in order of first appearance.
    pub counts: Vec<(String, usize, usize)>,
    /// All train counts equal and all val counts equal.
    pub balanced: bool,
}

pub fn class_balance(m: &Manifest) -> ClassBalance {
    let names = m.class_names();
    let mut tally: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for e in &m.entries {
        let slot = tally.entry(e.label.as_str()).or_default();
        match e.split {
            Split::Train => slot.0 += 1,
            Split::Val => slot.1 += 1,
        }
    }
    let counts: Vec<(String, usize, usize)> = names
        .into_iter()
        .map(|n| {
            let (t, v) = tally[n.as_str()];
            (n, t, v)
        })
        .collect();
    let balanced = counts.windows(2).all(|w| w[0].1 == w[1].1 && w[0].2 == w[1].2);
    ClassBalance { counts, balanced }
}
