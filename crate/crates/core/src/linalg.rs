//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Spectral norm of a block. Closed form for 1×1 and 2×2, SVD otherwise.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    match (m.nrows(), m.ncols()) {
        (0, _) | (_, 0) => 0.0,
        (1, 1) => m[(0, 0)].abs(),
        (2, 2) => {
            let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            let s = a * a + b * b + c * c + d * d;
            let det = a * d - b * c;
            let disc = (s * s - 4.0 * det * det).max(0.0).sqrt();
            (0.5 * (s + disc)).sqrt()
        }
        _ => m.clone().svd(false, false).singular_values.max(),
    }
}

/// Orthonormal basis of the column span (thin QR).
pub fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return m.clone();
    }
    m.clone().qr().q()
}

/// Thin QR returning `(Q, |diag R|)`.
pub fn qr_with_scales(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    if m.ncols() == 0 {
        return (m.clone(), Vec::new());
    }
    let qr = m.clone().qr();
    let r = qr.r();
    let scales = (0..m.ncols()).map(|i| r[(i, i)].abs()).collect();
    (qr.q(), scales)
}

/// Distance between the column spans of two orthonormal bases: `||Q1 Q1ᵀ − Q2 Q2ᵀ||₂`.
pub fn subspace_distance(q1: &DMatrix<f64>, q2: &DMatrix<f64>) -> f64 {
    let p1 = q1 * q1.transpose();
    let p2 = q2 * q2.transpose();
    spectral_norm(&(p1 - p2))
}

/// Spectral norm of `m` restricted to the span of the orthonormal columns of `basis`.
pub fn restricted_norm(m: &DMatrix<f64>, basis: &DMatrix<f64>) -> f64 {
    if basis.ncols() == 0 {
        return 0.0;
    }
    spectral_norm(&(m * basis))
}

pub fn unit(v: DVector<f64>) -> DVector<f64> {
    let n = v.norm();
    if n > 0.0 {
        v / n
    } else {
        v
    }
}
