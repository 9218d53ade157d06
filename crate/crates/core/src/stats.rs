//! Small statistics helpers.

/// Pearson correlation of two equal-length sequences.
///
/// Returns 0 when either side has zero variance or the inputs are empty or of
/// different lengths.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() || a.is_empty() {
        return 0.0;
    }
    let constant = |v: &[f64]| v.iter().all(|&x| x == v[0]);
    if constant(a) || constant(b) {
        return 0.0;
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    (sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_correlation_is_one() {
        let a = [0.1, 0.5, 0.2, 0.9];
        assert!((pearson(&a, &a) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_side_gives_zero() {
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]), 0.0);
        assert_eq!(pearson(&[0.3; 4], &[0.3; 4]), 0.0);
    }

    #[test]
    fn anti_correlation() {
        assert!((pearson(&[0.0, 1.0, 2.0], &[2.0, 1.0, 0.0]) + 1.0).abs() < 1e-15);
    }
}
