//! Dense complex helpers shared by the numerical modules.

use nalgebra::{DMatrix, DVector, Dim, Matrix, RawStorage};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Phase cutoff used when picking the reference component of a vector.
pub const PHASE_REF_TOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cvec(values: &[Complex64]) -> CVector {
    CVector::from_column_slice(values)
}

pub fn real_cvec(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.0)))
}

/// Frobenius norm of any complex matrix or vector.
pub fn frobenius<R: Dim, C: Dim, S: RawStorage<Complex64, R, C>>(m: &Matrix<Complex64, R, C, S>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entrywise deviation of `m` from being Hermitian.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Makes the first component with modulus above [`PHASE_REF_TOL`] real positive.
pub fn fix_phase(v: &mut CVector) {
    if let Some(z) = v.iter().find(|z| z.norm() > PHASE_REF_TOL).copied() {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

/// Euclidean distance between `a` and `b` after rotating `b` by the global
/// phase that best aligns it with `a`.
pub fn phase_aligned_distance(a: &CVector, b: &CVector) -> f64 {
    let overlap = b.dotc(a);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    vec_norm(&(a - b * phase))
}

/// Ascending Hermitian eigendecomposition: `(values, vectors)` with
/// orthonormal eigenvectors stored as columns.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    // symmetrize so that rounding noise in the input does not leak into the solver
    let sym = (m + m.adjoint()).map(|z| z * 0.5);
    let eig = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, 10_000)
        .ok_or(Error::EigenNoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    Ok((values, vectors))
}

pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigen(m)?.0[0])
}

/// Solves `upper * x = b` for an invertible upper-triangular matrix.
pub fn solve_upper(upper: &CMatrix, b: &CMatrix) -> CMatrix {
    upper
        .solve_upper_triangular(b)
        .expect("embedding is invertible for a positive definite Gram matrix")
}

pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

/// Maximum deviation of `u^dag u` from the identity.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    let g = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_is_ascending_and_accurate() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0),
                c(0.3, 0.4),
                c(0.0, -0.2),
                c(0.3, -0.4),
                c(1.0, 0.0),
                c(0.1, 0.0),
                c(0.0, 0.2),
                c(0.1, 0.0),
                c(3.0, 0.0),
            ],
        );
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for k in 0..3 {
            let v = vecs.column(k).into_owned();
            let r = &m * &v - &v * c(vals[k], 0.0);
            assert!(vec_norm(&r) < 1e-13);
        }
        assert!(unitarity_defect(&vecs) < 1e-13);
    }

    #[test]
    fn phase_fix_makes_first_component_real() {
        let mut v = cvec(&[c(0.0, 0.0), c(0.0, 2.0), c(1.0, 1.0)]);
        fix_phase(&mut v);
        assert_eq!(v[0], ZERO);
        assert!((v[1] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn aligned_distance_ignores_global_phase() {
        let a = cvec(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let b = &a * Complex64::from_polar(1.0, 0.7);
        assert!(phase_aligned_distance(&a, &b) < 1e-15);
    }
}
