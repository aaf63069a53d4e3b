//! Sturm-sequence bisection for symmetric tridiagonal matrices.

use crate::error::{invalid, Result};

const PIVOT_GUARD: f64 = 1e-300;

/// Number of eigenvalues strictly below `lambda`.
///
/// Counts negative pivots of the LDLᵀ factorisation of `T - λI`. A pivot
/// that vanishes is nudged away from zero, which keeps the recurrence finite.
pub fn sturm_count(diag: &[f64], off: &[f64], lambda: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] / q };
        q = d - lambda - coupling;
        if q.abs() < PIVOT_GUARD {
            q = -PIVOT_GUARD;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing every eigenvalue.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// Eigenvalue with ascending index `m` (0 = smallest).
pub fn eigenvalue_by_index(diag: &[f64], off: &[f64], m: usize, bounds: (f64, f64)) -> f64 {
    let (mut a, mut b) = bounds;
    for _ in 0..300 {
        let mid = 0.5 * (a + b);
        if b - a <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) + f64::MIN_POSITIVE || mid == a || mid == b {
            break;
        }
        if sturm_count(diag, off, mid) <= m {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// The `k` largest eigenvalues, in descending order.
///
/// Bisection runs to a few ulps of the bracketing interval, well inside the
/// `1e-10 max|diag|` accuracy the backward error of the Sturm count allows.
pub fn eig_tridiag_symmetric(diag: &[f64], off: &[f64], k: usize) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(invalid("tridiagonal matrix has inconsistent band lengths"));
    }
    if k == 0 || k > n {
        return Err(invalid(format!("requested {k} eigenvalues of a {n}x{n} matrix")));
    }
    if diag.iter().chain(off).any(|v| !v.is_finite()) {
        return Err(invalid("tridiagonal matrix has non-finite entries"));
    }
    let (lo, hi) = gershgorin(diag, off);
    let pad = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
    let bounds = (lo - pad, hi + pad);
    Ok((0..k).map(|j| eigenvalue_by_index(diag, off, n - 1 - j, bounds)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let e = eig_tridiag_symmetric(&[2.0, 2.0], &[1.0], 2).unwrap();
        assert!((e[0] - 3.0).abs() < 1e-14);
        assert!((e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_k() {
        assert!(eig_tridiag_symmetric(&[1.0, 2.0], &[0.0], 3).is_err());
        assert!(eig_tridiag_symmetric(&[1.0, 2.0], &[0.0], 0).is_err());
    }

    #[test]
    fn count_below_spectrum_edges() {
        let d = [0.0; 5];
        let o = [1.0; 4];
        assert_eq!(sturm_count(&d, &o, -3.0), 0);
        assert_eq!(sturm_count(&d, &o, 3.0), 5);
    }
}
