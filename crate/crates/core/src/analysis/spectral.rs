use nalgebra::SymmetricEigen;

use super::{check_lambda, PriorCovariance};
use crate::error::Result;
use crate::graphkit::OperatedWeights;

/// Error and derivative expression of one instance as functions of
/// `lambda`, from the eigendecomposition `W11 = Q diag(mu) Q^T`.
///
/// With `g_k = 1 / (1 - (1 - lambda) mu_k)`,
/// `L11 = lambda Q G Q^T` and `L12 = (1 - lambda) Q G Q^T W12`, so
/// `e_R = sum_k g_k^2 (lambda^2 s_k + (1 - lambda)^2 u_k) - (2 lambda / R) sum_k g_k t_k + S / R`
/// and each evaluation costs `O(R)`.
#[derive(Clone, Debug)]
pub struct ErrorSpectrum {
    mu: Vec<f64>,
    /// `sum_j sigma_j Q_jk^2` over regular `j`.
    s: Vec<f64>,
    /// `sum_j sigma_j Q_jk (Q^T 1)_k` over regular `j`.
    t: Vec<f64>,
    /// `sum_m sigma_m (Q^T W12)_km^2`.
    u: Vec<f64>,
    /// `sum_j sigma_j` over regular `j`.
    sigma_r: f64,
    r: f64,
}

impl ErrorSpectrum {
    pub fn new(w: &OperatedWeights, cov: &PriorCovariance) -> Result<Self> {
        let sigma = cov.block_diagonal(w)?;
        let r = w.r();
        let eig = SymmetricEigen::new(w.w11());
        let q = &eig.eigenvectors;
        let qw = q.transpose() * w.w12();
        let ones = q.row_sum();
        let mut s = vec![0.0; r];
        let mut t = vec![0.0; r];
        let mut u = vec![0.0; r];
        for k in 0..r {
            for j in 0..r {
                let qjk = q[(j, k)];
                s[k] += sigma[j] * qjk * qjk;
                t[k] += sigma[j] * qjk;
            }
            t[k] *= ones[k];
            u[k] = (0..w.m()).map(|m| sigma[r + m] * qw[(k, m)].powi(2)).sum();
        }
        Ok(ErrorSpectrum {
            mu: eig.eigenvalues.iter().copied().collect(),
            s,
            t,
            u,
            sigma_r: sigma[..r].iter().sum(),
            r: r as f64,
        })
    }

    pub fn error(&self, lambda: f64) -> Result<f64> {
        check_lambda(lambda)?;
        let c = 1.0 - lambda;
        let mut quad = 0.0;
        let mut lin = 0.0;
        for k in 0..self.mu.len() {
            let g = 1.0 / (1.0 - c * self.mu[k]);
            quad += g * g * (lambda * lambda * self.s[k] + c * c * self.u[k]);
            lin += g * self.t[k];
        }
        Ok(quad - 2.0 * lambda / self.r * lin + self.sigma_r / self.r)
    }

    /// Half the derivative of [`Self::error`], the same quantity as
    /// [`super::error_derivative`].
    pub fn derivative(&self, lambda: f64) -> Result<f64> {
        check_lambda(lambda)?;
        let c = 1.0 - lambda;
        let mut total = 0.0;
        for k in 0..self.mu.len() {
            let g = 1.0 / (1.0 - c * self.mu[k]);
            // dg/dlambda = -mu g^2
            let dg = -self.mu[k] * g * g;
            let a = lambda * lambda * self.s[k] + c * c * self.u[k];
            let da = 2.0 * lambda * self.s[k] - 2.0 * c * self.u[k];
            total += 2.0 * g * dg * a + g * g * da;
            total -= 2.0 / self.r * (g + lambda * dg) * self.t[k];
        }
        Ok(0.5 * total)
    }
}
