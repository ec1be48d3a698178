//! (min,+)-convolution and its decision variant, by the quadratic double loop.

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// `c[l] = min_{i + j = l} a[i] + b[j]` for `l` in `0..2n-1`.
pub fn convolve_min_plus<T: Scalar>(a: &[T], b: &[T]) -> Result<Vec<T>> {
    if a.is_empty() || b.is_empty() {
        return invalid("convolution inputs must be non-empty");
    }
    if a.len() != b.len() {
        return invalid("convolution inputs must have equal length");
    }
    let a: Vec<Option<T>> = a.iter().map(|&v| Some(v)).collect();
    let b: Vec<Option<T>> = b.iter().map(|&v| Some(v)).collect();
    Ok(convolve_extended(&a, &b).into_iter().map(|v| v.expect("finite inputs")).collect())
}

/// Convolution over values extended with `None` as +∞. Output has length
/// `a.len() + b.len() - 1`.
pub(crate) fn convolve_extended<T: Scalar>(a: &[Option<T>], b: &[Option<T>]) -> Vec<Option<T>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c: Vec<Option<T>> = vec![None; a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        let Some(ai) = *ai else { continue };
        for (j, bj) in b.iter().enumerate() {
            let Some(bj) = *bj else { continue };
            let v = ai + bj;
            let slot = &mut c[i + j];
            if slot.map_or(true, |cur| v < cur) {
                *slot = Some(v);
            }
        }
    }
    c
}

/// True iff `c[l] <= min_{i + j = l} a[i] + b[j]` for every `l` in `0..n`.
pub fn decide_convolution<T: Scalar>(a: &[T], b: &[T], c: &[T]) -> Result<bool> {
    let n = a.len();
    if b.len() != n || c.len() != n {
        return invalid("sequences must have equal length");
    }
    for (l, &cl) in c.iter().enumerate() {
        for i in 0..=l {
            if a[i] + b[l - i] < cl {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
