//! Training-phase Gaussian model, the moving-average Hotelling T² statistic
//! and its control limits.

use serde::{Deserialize, Serialize};

use crate::distribution::f_quantile;
use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::scalar::{CompensatedSum, Scalar};

/// Sample mean and covariance of fault-free training data.
///
/// Immutable once built; share it behind an `Arc` between charts.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel<T> {
    mean: Vec<T>,
    cov: Matrix<T>,
    cov_inv: Matrix<T>,
    n_train: usize,
}

impl<T: Scalar> GaussianModel<T> {
    /// Fits mean and unbiased (N−1) covariance from training samples.
    pub fn fit(samples: &[Vec<T>]) -> Result<Self> {
        let dim = samples.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::Domain("training samples must have at least one variable".into()));
        }
        if let Some(bad) = samples.iter().find(|s| s.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
        }
        let n = samples.len();
        if n < dim + 2 {
            return Err(Error::TooFewSamples { needed: dim + 2, got: n });
        }
        let nf = T::of_count(n);
        let mean: Vec<T> = (0..dim)
            .map(|j| {
                let mut acc = CompensatedSum::new();
                samples.iter().for_each(|s| acc.add(s[j]));
                acc.value() / nf
            })
            .collect();
        let mut cov = Matrix::zeros(dim);
        let denom = T::of_count(n - 1);
        for i in 0..dim {
            for j in 0..=i {
                let mut acc = CompensatedSum::new();
                for s in samples {
                    acc.add((s[i] - mean[i]) * (s[j] - mean[j]));
                }
                let v = acc.value() / denom;
                cov.set(i, j, v);
                cov.set(j, i, v);
            }
        }
        Self::from_parts(mean, cov, n)
    }

    /// Builds a model from known moments, e.g. population parameters used
    /// as an oracle in place of estimates.
    pub fn from_parts(mean: Vec<T>, cov: Matrix<T>, n_train: usize) -> Result<Self> {
        let dim = mean.len();
        if cov.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: cov.dim() });
        }
        if n_train < dim + 2 {
            return Err(Error::TooFewSamples { needed: dim + 2, got: n_train });
        }
        let scale = (0..dim).map(|i| cov.get(i, i).abs()).fold(T::zero(), T::max);
        if !cov.is_symmetric(scale * T::of(1e-12)) {
            return Err(Error::Domain("covariance matrix is not symmetric".into()));
        }
        let chol = Cholesky::factor(&cov)?;
        let cov_inv = chol.inverse();
        let residual = cov_inv.matmul(&cov).max_abs_diff(&Matrix::identity(dim));
        if residual.to_f64_lossy() >= inverse_tolerance::<T>() {
            return Err(Error::SingularCovariance { rcond: chol.rcond_estimate() });
        }
        Ok(Self { mean, cov, cov_inv, n_train })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix<T> {
        &self.cov
    }

    pub fn cov_inv(&self) -> &Matrix<T> {
        &self.cov_inv
    }

    /// Squared Mahalanobis length `vᵀ S⁻¹ v` of a displacement.
    pub fn mahalanobis_sq(&self, v: &[T]) -> Result<T> {
        self.check_dim(v.len())?;
        Ok(self.cov_inv.quad_form(v).max(T::zero()))
    }

    /// `T² = (x̄_k − x̄)ᵀ S⁻¹ (x̄_k − x̄)` for a window mean `x̄_k`.
    pub fn hotelling_t2(&self, window_mean: &[T]) -> Result<T> {
        self.check_dim(window_mean.len())?;
        let d: Vec<T> = window_mean.iter().zip(&self.mean).map(|(&a, &b)| a - b).collect();
        Ok(self.cov_inv.quad_form(&d).max(T::zero()))
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }
}

fn inverse_tolerance<T: Scalar>() -> f64 {
    // 1e-8 in double precision; scaled for narrower types
    (T::epsilon().to_f64_lossy() * 4.5e7).max(1e-8)
}

/// Significance level and window length of one MA-TCC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartConfig {
    pub alpha: f64,
    pub window: usize,
}

impl ChartConfig {
    pub fn new(alpha: f64, window: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if window == 0 {
            return Err(Error::Domain("window length must be at least 1".into()));
        }
        Ok(Self { alpha, window })
    }
}

/// Control limits `δ²_W` for one training set size, dimension and α.
///
/// Holds the F quantile so limits for many windows share one inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlLimits {
    n_train: usize,
    dim: usize,
    alpha: f64,
    f_alpha: f64,
}

impl ControlLimits {
    pub fn new(n_train: usize, dim: usize, alpha: f64) -> Result<Self> {
        if n_train < dim + 2 {
            return Err(Error::TooFewSamples { needed: dim + 2, got: n_train });
        }
        let f_alpha = f_quantile(alpha, dim, n_train - dim)?;
        Ok(Self { n_train, dim, alpha, f_alpha })
    }

    pub fn for_model<T: Scalar>(model: &GaussianModel<T>, alpha: f64) -> Result<Self> {
        Self::new(model.n_train(), model.dim(), alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `F_α(p, N − p)`.
    pub fn f_alpha(&self) -> f64 {
        self.f_alpha
    }

    /// `δ²_W = p(N+W)(N−1) / (N W (N−p)) · F_α(p, N−p)`.
    pub fn limit(&self, window: usize) -> f64 {
        let n = self.n_train as f64;
        let p = self.dim as f64;
        let w = window as f64;
        p * (n + w) * (n - 1.0) / (n * w * (n - p)) * self.f_alpha
    }

    /// Single-observation limit `δ² = δ²_1`.
    pub fn base(&self) -> f64 {
        self.limit(1)
    }
}

/// `δ²_W` for a model and chart configuration.
pub fn control_limit<T: Scalar>(model: &GaussianModel<T>, cfg: &ChartConfig) -> Result<T> {
    let limits = ControlLimits::for_model(model, cfg.alpha)?;
    Ok(T::of(limits.limit(cfg.window)))
}

/// Free-function form of [`GaussianModel::fit`].
pub fn fit_model<T: Scalar>(samples: &[Vec<T>]) -> Result<GaussianModel<T>> {
    GaussianModel::fit(samples)
}

/// Free-function form of [`GaussianModel::hotelling_t2`].
pub fn hotelling_t2<T: Scalar>(model: &GaussianModel<T>, window_mean: &[T]) -> Result<T> {
    model.hotelling_t2(window_mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_cloud() -> Vec<Vec<f64>> {
        vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0], vec![2.0, 2.0]]
    }

    #[test]
    fn fit_symmetric_four_point_cloud() {
        let m = GaussianModel::fit(&square_cloud()).unwrap();
        assert_eq!(m.mean(), &[1.0, 1.0]);
        let c = m.cov();
        assert!((c.get(0, 0) - 4.0 / 3.0).abs() < 1e-15);
        assert!((c.get(1, 1) - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.get(0, 1), 0.0);
        assert!(m.cov_inv().matmul(c).max_abs_diff(&Matrix::identity(2)) < 1e-12);
        assert_eq!(m.n_train(), 4);
    }

    #[test]
    fn fit_rejects_degenerate_training_data() {
        let same = vec![vec![1.0, 2.0]; 4];
        assert!(matches!(GaussianModel::fit(&same), Err(Error::SingularCovariance { .. })));
        let three = vec![vec![1.0, 2.0]; 3];
        assert_eq!(
            GaussianModel::fit(&three).unwrap_err(),
            Error::TooFewSamples { needed: 4, got: 3 }
        );
        let ragged = vec![vec![1.0, 2.0], vec![1.0], vec![0.0, 1.0], vec![3.0, 1.0]];
        assert!(matches!(GaussianModel::fit(&ragged), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hotelling_t2_identity_cases() {
        let m = GaussianModel::<f64>::from_parts(vec![0.0, 0.0], Matrix::identity(2), 100).unwrap();
        assert_eq!(m.hotelling_t2(&[0.0, 0.0]).unwrap(), 0.0);
        assert!((m.hotelling_t2(&[3.0, 4.0]).unwrap() - 25.0).abs() < 1e-12);
        assert_eq!(
            m.hotelling_t2(&[1.0]).unwrap_err(),
            Error::DimensionMismatch { expected: 2, got: 1 }
        );
    }

    #[test]
    fn hotelling_t2_matches_cofactor_inverse() {
        let cov = Matrix::<f64>::from_rows(&[vec![3.0, 2.6], vec![2.6, 4.0]]).unwrap();
        let m = GaussianModel::from_parts(vec![6.0, 4.0], cov, 5000).unwrap();
        let x = [7.3, 2.1];
        let (a, b, d) = (3.0, 2.6, 4.0);
        let det = a * d - b * b;
        let (v0, v1) = (x[0] - 6.0, x[1] - 4.0);
        let brute = (d * v0 * v0 - 2.0 * b * v0 * v1 + a * v1 * v1) / det;
        let got = m.hotelling_t2(&x).unwrap();
        assert!(((got - brute) / brute).abs() < 1e-12);
    }

    #[test]
    fn control_limit_values() {
        let limits = ControlLimits::new(5000, 2, 0.01).unwrap();
        // δ² from the reference F quantile 4.609416009441565
        let want = 2.0 * 5001.0 * 4999.0 / (5000.0 * 4998.0) * 4.609_416_009_441_565;
        assert!((limits.base() - want).abs() / want < 1e-10);
        assert!((limits.base() - 9.2225).abs() < 1e-3);
        let ratio = limits.limit(10) / limits.base();
        assert!((ratio - 5010.0 / (10.0 * 5001.0)).abs() < 1e-15);
        assert!((ratio - 0.10018).abs() < 1e-5);
        // large-W floor is δ²/(N+1), never zero
        let floor = limits.base() / 5001.0;
        let far = limits.limit(1_000_000_000);
        assert!(far > floor && (far - floor) / floor < 1e-5);
    }

    #[test]
    fn chart_config_validation() {
        assert!(ChartConfig::new(0.01, 5).is_ok());
        assert!(ChartConfig::new(0.0, 5).is_err());
        assert!(ChartConfig::new(1.0, 5).is_err());
        assert!(ChartConfig::new(0.01, 0).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let samples: Vec<Vec<f32>> = square_cloud()
            .into_iter()
            .map(|v| v.into_iter().map(|x| x as f32).collect())
            .collect();
        let m = GaussianModel::fit(&samples).unwrap();
        assert!((m.cov().get(0, 0) - 4.0 / 3.0).abs() < 1e-6);
        let limit: f32 = control_limit(&m, &ChartConfig::new(0.05, 1).unwrap()).unwrap();
        assert!(limit > 0.0);
    }
}
