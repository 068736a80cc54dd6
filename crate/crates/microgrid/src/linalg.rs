//! Small dense linear algebra on top of nalgebra.

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::topology::ComplexValue;

/// Real 2x2 block of multiplication by `z` acting on `(re, im)`.
pub fn cmat(z: ComplexValue) -> Matrix2<f64> {
    Matrix2::new(z.re, -z.im, z.im, z.re)
}

pub fn set_block(m: &mut DMatrix<f64>, r: usize, c: usize, b: &Matrix2<f64>) {
    for i in 0..2 {
        for j in 0..2 {
            m[(r + i, c + j)] = b[(i, j)];
        }
    }
}

pub fn add_block(m: &mut DMatrix<f64>, r: usize, c: usize, b: &Matrix2<f64>) {
    for i in 0..2 {
        for j in 0..2 {
            m[(r + i, c + j)] += b[(i, j)];
        }
    }
}

/// Largest real part among the eigenvalues.
pub fn spectral_abscissa(a: &DMatrix<f64>) -> f64 {
    a.clone()
        .complex_eigenvalues()
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Stabilizing solution of `A'P + PA - P B R^-1 B' P + Q = 0`.
///
/// Uses the matrix sign function of the Hamiltonian with determinant scaling,
/// then recovers P from the stable invariant subspace by least squares.
pub fn care(a: &DMatrix<f64>, b: &DMatrix<f64>, q: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || q.shape() != (n, n) || r.shape() != (b.ncols(), b.ncols()) {
        return Err(Error::Dimension("care operands".into()));
    }
    let r_inv = r.clone().try_inverse().ok_or(Error::Singular("care: R"))?;
    let g = b * &r_inv * b.transpose();

    let mut h = DMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((0, n), (n, n)).copy_from(&(-&g));
    h.view_mut((n, 0), (n, n)).copy_from(&(-q));
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let mut w = h;
    let mut converged = false;
    for _ in 0..100 {
        let lu = w.clone().lu();
        let det = lu.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Riccati("Hamiltonian has eigenvalues on the imaginary axis".into()));
        }
        let inv = lu.try_inverse().ok_or(Error::Singular("care: sign iteration"))?;
        let c = det.abs().powf(-1.0 / (2 * n) as f64);
        let next = 0.5 * (c * &w + inv / c);
        let diff = (&next - &w).norm();
        let size = next.norm();
        w = next;
        if diff <= 1e-13 * size {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Riccati("sign iteration did not converge".into()));
    }

    let id = DMatrix::<f64>::identity(n, n);
    let w11 = w.view((0, 0), (n, n)).into_owned();
    let w12 = w.view((0, n), (n, n)).into_owned();
    let w21 = w.view((n, 0), (n, n)).into_owned();
    let w22 = w.view((n, n), (n, n)).into_owned();
    let mut lhs = DMatrix::zeros(2 * n, n);
    lhs.view_mut((0, 0), (n, n)).copy_from(&w12);
    lhs.view_mut((n, 0), (n, n)).copy_from(&(w22 + &id));
    let mut rhs = DMatrix::zeros(2 * n, n);
    rhs.view_mut((0, 0), (n, n)).copy_from(&(-(w11 + &id)));
    rhs.view_mut((n, 0), (n, n)).copy_from(&(-w21));

    let p = lhs
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Riccati(e.to_string()))?;
    let p = 0.5 * (&p + p.transpose());

    let res = a.transpose() * &p + &p * a - &p * &g * &p + q;
    let scale = q.norm().max((a.transpose() * &p).norm()).max(1.0);
    if !(res.norm() <= 1e-8 * scale) {
        return Err(Error::Riccati(format!("residual {:.3e}", res.norm() / scale)));
    }
    Ok(p)
}
