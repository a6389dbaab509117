use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::scalar::Scalar;

/// `n` independent draws from `N(mean, cov)`, deterministic per seed.
pub fn gen_gaussian_stream<T: Scalar>(mean: &[T], cov: &Matrix<T>, n: usize, seed: u64) -> Result<Vec<Vec<T>>> {
    if cov.dim() != mean.len() {
        return Err(Error::DimensionMismatch { expected: mean.len(), got: cov.dim() });
    }
    let chol = Cholesky::factor(cov)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw(&chol, mean, n, &mut rng))
}

pub(crate) fn draw<T: Scalar>(chol: &Cholesky<T>, mean: &[T], n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<T>> {
    let p = mean.len();
    let mut z = vec![T::zero(); p];
    (0..n)
        .map(|_| {
            for zi in z.iter_mut() {
                let u: f64 = StandardNormal.sample(rng);
                *zi = T::of(u);
            }
            chol.mul_lower(&z).iter().zip(mean).map(|(&a, &m)| a + m).collect()
        })
        .collect()
}
