//! Small dense linear algebra for p×p covariance matrices.
//!
//! Dimensions in this toolkit are a handful of process variables, so plain
//! row-major storage and textbook factorizations are all that is needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![T::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.dim).map(<[T]>::to_vec).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.dim);
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let s = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
                out.set(i, j, s);
            }
        }
        out
    }

    /// `vᵀ M v`.
    pub fn quad_form(&self, v: &[T]) -> T {
        v.iter().zip(self.mul_vec(v)).map(|(&a, b)| a * b).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }
}

/// Lower-triangular Cholesky factor `A = L Lᵀ` of a symmetric positive
/// definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

/// Reciprocal condition estimates below this are rejected.
pub const MIN_RCOND: f64 = 1e-12;

impl<T: Scalar> Cholesky<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        let n = a.dim();
        let mut l = Matrix::zeros(n);
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d = d - l.get(j, k) * l.get(j, k);
            }
            if d.is_nan() || d <= T::zero() {
                return Err(Error::SingularCovariance { rcond: 0.0 });
            }
            let djj = d.sqrt();
            l.set(j, j, djj);
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s = s - l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / djj);
            }
        }
        let chol = Self { l };
        let rcond = chol.rcond_estimate();
        if !(rcond >= MIN_RCOND) {
            return Err(Error::SingularCovariance { rcond });
        }
        Ok(chol)
    }

    pub fn lower(&self) -> &Matrix<T> {
        &self.l
    }

    /// Cheap reciprocal condition estimate from the factor's diagonal,
    /// `(min Lᵢᵢ / max Lᵢᵢ)²`.
    pub fn rcond_estimate(&self) -> f64 {
        let n = self.l.dim();
        if n == 0 {
            return 1.0;
        }
        let diag: Vec<f64> = (0..n).map(|i| self.l.get(i, i).to_f64_lossy()).collect();
        let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = diag.iter().copied().fold(0.0, f64::max);
        if hi <= 0.0 {
            0.0
        } else {
            (lo / hi).powi(2)
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.dim();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.l.get(i, k) * y[k];
            }
            y[i] = s / self.l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s = s - self.l.get(k, i) * y[k];
            }
            y[i] = s / self.l.get(i, i);
        }
        y
    }

    pub fn inverse(&self) -> Matrix<T> {
        let n = self.l.dim();
        let mut inv = Matrix::zeros(n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv.set(i, j, col[i]);
            }
        }
        // symmetrize away round-off
        for i in 0..n {
            for j in 0..i {
                let m = (inv.get(i, j) + inv.get(j, i)) * T::of(0.5);
                inv.set(i, j, m);
                inv.set(j, i, m);
            }
        }
        inv
    }

    /// `L z`, used to colour standard-normal draws.
    pub fn mul_lower(&self, z: &[T]) -> Vec<T> {
        let n = self.l.dim();
        (0..n)
            .map(|i| (0..=i).map(|k| self.l.get(i, k) * z[k]).sum())
            .collect()
    }

    /// `L⁻¹ v`, the whitening transform.
    pub fn whiten(&self, v: &[T]) -> Vec<T> {
        let n = self.l.dim();
        let mut y = v.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.l.get(i, k) * y[k];
            }
            y[i] = s / self.l.get(i, i);
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd3() -> Matrix<f64> {
        Matrix::from_rows(&[
            vec![4.0, 1.2, -0.4],
            vec![1.2, 3.0, 0.5],
            vec![-0.4, 0.5, 2.0],
        ])
        .unwrap()
    }

    #[test]
    fn factor_reconstructs_matrix() {
        let a = spd3();
        let c = Cholesky::factor(&a).unwrap();
        let l = c.lower();
        let mut lt = Matrix::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                lt.set(i, j, l.get(j, i));
            }
        }
        assert!(l.matmul(&lt).max_abs_diff(&a) < 1e-14);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = spd3();
        let inv = Cholesky::factor(&a).unwrap().inverse();
        assert!(inv.matmul(&a).max_abs_diff(&Matrix::identity(3)) < 1e-12);
        assert!(inv.is_symmetric(0.0));
    }

    #[test]
    fn whitened_norm_matches_inverse_quadratic_form() {
        let a = spd3();
        let c = Cholesky::factor(&a).unwrap();
        let v = [0.3, -1.7, 2.2];
        let w = c.whiten(&v);
        let n2: f64 = w.iter().map(|x| x * x).sum();
        assert!((n2 - c.inverse().quad_form(&v)).abs() < 1e-12);
    }

    #[test]
    fn singular_and_indefinite_matrices_are_rejected() {
        let zero = Matrix::<f64>::zeros(2);
        assert!(matches!(Cholesky::factor(&zero), Err(Error::SingularCovariance { .. })));
        let rank1 = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(Cholesky::factor(&rank1), Err(Error::SingularCovariance { .. })));
        let indefinite = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(Cholesky::factor(&indefinite).is_err());
        let ill = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1e-14]]).unwrap();
        assert!(matches!(Cholesky::factor(&ill), Err(Error::SingularCovariance { .. })));
    }

    #[test]
    fn ragged_rows_are_a_dimension_error() {
        let err = Matrix::<f64>::from_rows(&[vec![1.0, 0.0], vec![1.0]]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, got: 1 });
    }
}
