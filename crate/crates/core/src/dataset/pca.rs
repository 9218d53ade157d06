//! PCA through a one-sided Jacobi SVD of the mean-centred data.

use alloc::vec;
use alloc::vec::Vec;

use super::{DatasetError, FeatureMatrix};

const MAX_SWEEPS: usize = 80;
const ORTHO_TOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub dim: usize,
    pub k: usize,
    pub mean: Vec<f64>,
    /// Row-major `k x dim`; rows are orthonormal.
    pub components: Vec<f64>,
    /// Variance along each component, descending.
    pub explained_variance: Vec<f64>,
    /// Total variance of the centred data (sum over all directions).
    pub total_variance: f64,
}

impl PcaModel {
    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i * self.dim..(i + 1) * self.dim]
    }

    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        self.explained_variance
            .iter()
            .map(|v| if self.total_variance > 0.0 { v / self.total_variance } else { 0.0 })
            .collect()
    }

    /// Projects row-major `n x dim` data onto the components.
    pub fn transform_rows(&self, data: &[f64]) -> Result<Vec<f64>, DatasetError> {
        if !data.len().is_multiple_of(self.dim) {
            return Err(DatasetError::DimMismatch { expected: self.dim, found: data.len() % self.dim });
        }
        let mut out = Vec::with_capacity(data.len() / self.dim * self.k);
        let mut centred = vec![0.0; self.dim];
        for row in data.chunks_exact(self.dim) {
            for ((c, x), m) in centred.iter_mut().zip(row).zip(&self.mean) {
                *c = x - m;
            }
            for i in 0..self.k {
                out.push(dot(self.component(i), &centred));
            }
        }
        Ok(out)
    }

    /// `mean + scores * components`, row-major `n x dim`.
    pub fn reconstruct(&self, scores: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(scores.len() / self.k.max(1) * self.dim);
        for s in scores.chunks_exact(self.k) {
            let mut row = self.mean.clone();
            for (i, &w) in s.iter().enumerate() {
                for (r, c) in row.iter_mut().zip(self.component(i)) {
                    *r += w * c;
                }
            }
            out.extend(row);
        }
        out
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hestenes one-sided Jacobi: rotates pairs of `cols` until they are
/// mutually orthogonal, applying the same rotations to `acc` if given.
fn orthogonalize(cols: &mut [Vec<f64>], mut acc: Option<&mut [Vec<f64>]>) {
    let m = cols.len();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..m {
            for q in p + 1..m {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || libm::fabs(gamma) <= ORTHO_TOL * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(cols, p, q, c, s);
                if let Some(a) = acc.as_deref_mut() {
                    rotate(a, p, q, c, s);
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Modified Gram-Schmidt of `v` against `basis`; returns the normalized
/// remainder, or `None` if it vanishes.
fn orthonormal_remainder(mut v: Vec<f64>, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    for _ in 0..2 {
        for b in basis {
            let d = dot(&v, b);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
    }
    let norm = libm::sqrt(dot(&v, &v));
    if norm < 1e-10 {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

/// Flips `v` so its largest-magnitude entry (first on ties) is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if libm::fabs(*x) > libm::fabs(v[best]) {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Right singular vectors with singular values, sorted descending.
fn right_singular(centred: &[f64], n: usize, dim: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    if n >= dim {
        // orthogonalize the dim columns; the accumulated rotation is V
        let mut cols: Vec<Vec<f64>> = (0..dim).map(|j| (0..n).map(|i| centred[i * dim + j]).collect()).collect();
        let mut v: Vec<Vec<f64>> = (0..dim)
            .map(|j| {
                let mut e = vec![0.0; dim];
                e[j] = 1.0;
                e
            })
            .collect();
        orthogonalize(&mut cols, Some(&mut v));
        let sigma: Vec<f64> = cols.iter().map(|c| libm::sqrt(dot(c, c))).collect();
        // v[j] is the j-th column of V = J
        sort_desc(sigma, v)
    } else {
        // orthogonalize the n rows (columns of A^T): they become sigma_i v_i
        let mut cols: Vec<Vec<f64>> = centred.chunks_exact(dim).map(|r| r.to_vec()).collect();
        orthogonalize(&mut cols, None);
        let sigma: Vec<f64> = cols.iter().map(|c| libm::sqrt(dot(c, c))).collect();
        sort_desc(sigma, cols)
    }
}

fn sort_desc(sigma: Vec<f64>, vecs: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    (order.iter().map(|&i| sigma[i]).collect(), order.into_iter().map(|i| vecs[i].clone()).collect())
}

/// Fits `k` principal components of row-major `n x dim` data.
pub fn pca_fit_rows(data: &[f64], n: usize, dim: usize, k: usize) -> Result<PcaModel, DatasetError> {
    if dim == 0 {
        return Err(DatasetError::ZeroDim);
    }
    if n < 2 {
        return Err(DatasetError::TooFewSamples(n));
    }
    if data.len() != n * dim {
        return Err(DatasetError::DimMismatch { expected: n * dim, found: data.len() });
    }
    if k > n.min(dim) {
        return Err(DatasetError::TooManyComponents { k, max: n.min(dim) });
    }
    let mut mean = vec![0.0; dim];
    for row in data.chunks_exact(dim) {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centred: Vec<f64> = data.chunks_exact(dim).flat_map(|r| r.iter().zip(&mean).map(|(x, m)| x - m)).collect();
    let denom = (n - 1) as f64;
    let total_variance = dot(&centred, &centred) / denom;

    let (sigma, vecs) = right_singular(&centred, n, dim);
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut variances = Vec::with_capacity(k);
    for (s, v) in sigma.iter().zip(vecs) {
        if basis.len() == k || *s <= sigma_max * 1e-12 {
            break;
        }
        if let Some(u) = orthonormal_remainder(v, &basis) {
            basis.push(u);
            variances.push(s * s / denom);
        }
    }
    // null directions: complete with canonical vectors
    let mut j = 0;
    while basis.len() < k && j < dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        if let Some(u) = orthonormal_remainder(e, &basis) {
            basis.push(u);
            variances.push(0.0);
        }
        j += 1;
    }
    let mut components = Vec::with_capacity(k * dim);
    for mut b in basis {
        fix_sign(&mut b);
        components.extend(b);
    }
    Ok(PcaModel { dim, k, mean, components, explained_variance: variances, total_variance })
}

pub fn pca_fit(x: &FeatureMatrix, k: usize) -> Result<PcaModel, DatasetError> {
    pca_fit_rows(x.data(), x.n_samples(), x.dim(), k)
}

/// Row-major `n x k` scores.
pub fn pca_transform(model: &PcaModel, x: &FeatureMatrix) -> Result<Vec<f64>, DatasetError> {
    if x.dim() != model.dim {
        return Err(DatasetError::DimMismatch { expected: model.dim, found: x.dim() });
    }
    model.transform_rows(x.data())
}
