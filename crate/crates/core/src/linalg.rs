//! Dense complex helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    // complex Schur form is upper triangular, eigenvalues on the diagonal
    m.clone().schur().unpack().1.diagonal().iter().copied().collect()
}

/// `‖MM* − M*M‖_F / ‖M‖_F²`.
pub fn normality_defect(m: &CMatrix) -> f64 {
    let a = m.adjoint();
    let scale = m.norm_squared();
    if scale == 0.0 {
        return 0.0;
    }
    (m * &a - &a * m).norm() / scale
}

pub fn is_normal(m: &CMatrix) -> bool {
    normality_defect(m) <= 1e-12
}

/// `f(M) = Q f(T) Q*` for normal `M = Q T Q*`.
pub fn normal_function(m: &CMatrix, f: impl Fn(Complex64) -> Result<Complex64>) -> Result<CMatrix> {
    let defect = normality_defect(m);
    if defect > 1e-12 {
        return Err(Error::NotNormal { defect });
    }
    let (q, t) = m.clone().schur().unpack();
    let n = m.nrows();
    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = f(t[(i, i)])?;
    }
    Ok(&q * d * q.adjoint())
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn shifted(m: &CMatrix, s: Complex64) -> CMatrix {
    m + identity(m.nrows()) * s
}

/// Solve `(M + s) X = B`.
pub fn solve_shifted(m: &CMatrix, s: Complex64, b: &CMatrix) -> Result<CMatrix> {
    shifted(m, s).lu().solve(b).ok_or(Error::SingularShift { shift: s })
}

pub fn largest_singular_value(m: &CMatrix) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    match m.clone().try_svd(false, false, f64::EPSILON, 10_000) {
        Some(svd) => Ok(svd.singular_values.iter().copied().fold(0.0, f64::max)),
        None => Err(Error::SvdNonConvergence { residual: m.norm() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn triangular_eigenvalues() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(5.0), c(0.0), c(2.0)]);
        let mut ev: Vec<f64> = eigenvalues(&m).iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14);
        assert!(!is_normal(&m));
    }

    #[test]
    fn singular_values_of_jordan_block() {
        // [[1,1],[0,1]] has largest singular value (1+√5)/2
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
        let s = largest_singular_value(&m).unwrap();
        assert!((s - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_shift_detected() {
        let m = CMatrix::from_row_slice(1, 1, &[c(1.0)]);
        assert!(matches!(solve_shifted(&m, c(-1.0), &identity(1)), Err(Error::SingularShift { .. })));
    }
}
