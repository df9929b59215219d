//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `‖X − Xᵀ‖_F / ‖X‖_F` (0 for the zero matrix).
pub fn symmetry_defect(x: &DMatrix<f64>) -> f64 {
    let n = x.norm();
    if n == 0.0 {
        return 0.0;
    }
    (x - x.transpose()).norm() / n
}

/// Extreme eigenvalues `(min, max)` of a symmetric matrix.
pub fn sym_eig_range(x: &DMatrix<f64>) -> (f64, f64) {
    let e = SymmetricEigen::new(x.clone()).eigenvalues;
    let min = e.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

pub fn sym_min_eig(x: &DMatrix<f64>) -> f64 {
    sym_eig_range(x).0
}

/// 2-norm condition number of a symmetric positive definite matrix.
pub fn spd_condition(x: &DMatrix<f64>) -> Result<f64> {
    let (lo, hi) = sym_eig_range(x);
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite("gram matrix"));
    }
    Ok(hi / lo)
}

pub fn to_complex(x: &DMatrix<f64>) -> DMatrix<Complex64> {
    x.map(|v| Complex64::new(v, 0.0))
}

/// `x* M y` for a real matrix `M`.
pub fn bilinear(m: &DMatrix<f64>, x: &DVector<Complex64>, y: &DVector<Complex64>) -> Complex64 {
    let my = to_complex(m) * y;
    x.dotc(&my)
}

/// Euclidean norm of a complex vector.
pub fn cnorm(x: &DVector<Complex64>) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Symmetrize in place: `X ← (X + Xᵀ)/2`.
pub fn symmetrize(x: &mut DMatrix<f64>) {
    let t = x.transpose();
    *x += t;
    *x *= 0.5;
}
