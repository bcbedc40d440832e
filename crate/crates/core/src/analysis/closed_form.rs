use nalgebra::DMatrix;

use super::{check_lambda, PriorCovariance};
use crate::dynamics::{steady_operator, SteadyOperator};
use crate::error::Result;
use crate::graphkit::OperatedWeights;

/// The matrices behind `e_R = tr(Sigma E^T E)`, all in block order.
#[derive(Clone, Debug)]
pub struct ErrorMatrixBundle {
    steady: SteadyOperator,
    /// `E = S_R L - C_R S_R`, `R x N`.
    e: DMatrix<f64>,
    sigma: Vec<f64>,
    m: usize,
}

impl ErrorMatrixBundle {
    pub fn new(w: &OperatedWeights, lambda: f64, cov: &PriorCovariance) -> Result<Self> {
        check_lambda(lambda)?;
        let sigma = cov.block_diagonal(w)?;
        let steady = steady_operator(w, lambda)?;
        let (n, r) = (w.n(), w.r());
        let l = steady.matrix();
        let e = DMatrix::from_fn(r, n, |i, j| {
            l[(i, j)] - if j < r { 1.0 / r as f64 } else { 0.0 }
        });
        Ok(ErrorMatrixBundle {
            steady,
            e,
            sigma,
            m: w.m(),
        })
    }

    pub fn steady(&self) -> &SteadyOperator {
        &self.steady
    }

    pub fn e(&self) -> &DMatrix<f64> {
        &self.e
    }

    /// Diagonal of `Sigma`.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// `S_R = [I_R 0]`.
    pub fn selector(&self) -> DMatrix<f64> {
        let r = self.e.nrows();
        DMatrix::from_fn(r, self.e.ncols(), |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// `C_R = (1/R) 1 1^T`.
    pub fn c_r(&self) -> DMatrix<f64> {
        let r = self.e.nrows();
        DMatrix::from_element(r, r, 1.0 / r as f64)
    }

    /// `C_RM = (1/M) 1_R 1_M^T`.
    pub fn c_rm(&self) -> DMatrix<f64> {
        DMatrix::from_element(self.e.nrows(), self.m, 1.0 / self.m as f64)
    }

    pub fn error(&self) -> f64 {
        self.e
            .column_iter()
            .zip(&self.sigma)
            .map(|(col, s)| s * col.norm_squared())
            .sum()
    }
}

/// Expected squared deviation of the regular steady states from the mean
/// of the regular priors.
pub fn error_closed_form(w: &OperatedWeights, lambda: f64, cov: &PriorCovariance) -> Result<f64> {
    Ok(ErrorMatrixBundle::new(w, lambda, cov)?.error())
}

/// `d e_R / d d = tr(L12^T L12)`.
pub fn error_partial_d(w: &OperatedWeights, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(steady_operator(w, lambda)?.l12().norm_squared())
}

/// `(1/lambda) tr(Sigma L^T (I - W'^T L^T) S_R^T E)`.
///
/// This is half of the true derivative of [`error_closed_form`]; the factor
/// does not change signs or roots.
pub fn error_derivative(w: &OperatedWeights, lambda: f64, cov: &PriorCovariance) -> Result<f64> {
    let b = ErrorMatrixBundle::new(w, lambda, cov)?;
    let l = b.steady().matrix();
    let r = w.r();
    // L^T (I - W'^T L^T) = (L - L W' L)^T
    let a = (l - l * w.permuted() * l).transpose();
    let prod = a.columns(0, r) * b.e();
    let tr: f64 = b
        .sigma()
        .iter()
        .enumerate()
        .map(|(j, s)| s * prod[(j, j)])
        .sum();
    Ok(tr / lambda)
}

/// Ratio of a central finite difference of the error to
/// [`error_derivative`]. Comes out as 2 up to truncation error.
pub fn derivative_ratio(
    w: &OperatedWeights,
    lambda: f64,
    cov: &PriorCovariance,
    h: f64,
) -> Result<f64> {
    let hi = error_closed_form(w, lambda + h, cov)?;
    let lo = error_closed_form(w, lambda - h, cov)?;
    Ok((hi - lo) / (2.0 * h) / error_derivative(w, lambda, cov)?)
}

/// `sum_{i in R} a_i` with `a_i = 1 - (1/R) sum_{m in M} W_im`: the
/// derivative expression at `lambda = 1` for unit prior variances. The noise
/// variance drops out.
pub fn derivative_at_one(w: &OperatedWeights) -> f64 {
    let r = w.r() as f64;
    w.w12().row_iter().map(|row| 1.0 - row.sum() / r).sum()
}
