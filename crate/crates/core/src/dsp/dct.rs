//! Orthonormal DCT-II and its inverse (DCT-III).

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::DspError;

fn scale(k: usize, n: usize) -> f64 {
    if k == 0 {
        libm::sqrt(1.0 / n as f64)
    } else {
        libm::sqrt(2.0 / n as f64)
    }
}

/// `X_k = s_k * sum_n x_n cos(pi (n + 1/2) k / N)` with `s_0 = sqrt(1/N)`,
/// `s_k = sqrt(2/N)`.
pub fn dct_ii(v: &[f64]) -> Result<Vec<f64>, DspError> {
    let n = v.len();
    if n == 0 {
        return Err(DspError::EmptyInput);
    }
    Ok((0..n)
        .map(|k| {
            let s: f64 = v
                .iter()
                .enumerate()
                .map(|(i, &x)| x * libm::cos(PI * (i as f64 + 0.5) * k as f64 / n as f64))
                .sum();
            s * scale(k, n)
        })
        .collect())
}

/// Inverse of [`dct_ii`].
pub fn dct_iii(c: &[f64]) -> Result<Vec<f64>, DspError> {
    let n = c.len();
    if n == 0 {
        return Err(DspError::EmptyInput);
    }
    Ok((0..n)
        .map(|i| {
            c.iter()
                .enumerate()
                .map(|(k, &x)| x * scale(k, n) * libm::cos(PI * (i as f64 + 0.5) * k as f64 / n as f64))
                .sum()
        })
        .collect())
}

/// Row-major `n_out x n` orthonormal DCT-II basis, for repeated transforms.
pub(crate) fn dct_ii_matrix(n: usize, n_out: usize) -> Vec<f64> {
    let mut m = Vec::with_capacity(n * n_out);
    for k in 0..n_out {
        let s = scale(k, n);
        m.extend((0..n).map(|i| s * libm::cos(PI * (i as f64 + 0.5) * k as f64 / n as f64)));
    }
    m
}
