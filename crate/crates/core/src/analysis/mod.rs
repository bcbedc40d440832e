//! Closed-form consensus error, its derivatives and limits, the
//! collaboration/competition split, baselines and lambda optimization.

mod baseline;
mod closed_form;
mod decompose;
mod gamma;
mod optimize;
mod spectral;

pub use baseline::{baseline_error, dominance_threshold, BaselineKind};
pub use closed_form::{
    derivative_at_one, derivative_ratio, error_closed_form, error_derivative, error_partial_d,
    ErrorMatrixBundle,
};
pub use decompose::{decompose_error, write_decomposition_csv, Decomposition};
pub use gamma::{
    derivative_limit_zero, derivative_limit_zero_noisy, gamma_and_limits, GammaDecomposition,
};
pub(crate) use optimize::refine_minimum;
pub use optimize::{
    critical_points, error_curve, lambda_grid, optimize_lambda, ErrorCurve, DEFAULT_GRID_SIZE,
    DEFAULT_LAMBDA_TOL, LAMBDA_LO,
};
pub use spectral::ErrorSpectrum;

use crate::error::{invalid, Result};
use crate::graphkit::OperatedWeights;

/// Covariance of the corrupted priors, `Sigma = diag(variances) + d V`,
/// where `V` marks the malicious nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorCovariance {
    d: f64,
    /// Per-node prior variances in label order; empty means all ones.
    variances: Vec<f64>,
}

impl PriorCovariance {
    pub fn new(d: f64, variances: Vec<f64>) -> Self {
        PriorCovariance { d, variances }
    }

    /// Unit prior variances.
    pub fn unit(d: f64) -> Self {
        PriorCovariance {
            d,
            variances: Vec::new(),
        }
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn variance(&self, node: usize) -> f64 {
        self.variances.get(node).copied().unwrap_or(1.0)
    }

    pub fn is_unit(&self) -> bool {
        self.variances.iter().all(|&v| v == 1.0)
    }

    /// Diagonal of `Sigma` in block order.
    pub fn block_diagonal(&self, w: &OperatedWeights) -> Result<Vec<f64>> {
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return Err(invalid(format!(
                "noise variance must be >= 0, got {}",
                self.d
            )));
        }
        if !self.variances.is_empty() && self.variances.len() != w.n() {
            return Err(invalid(format!(
                "expected {} prior variances, got {}",
                w.n(),
                self.variances.len()
            )));
        }
        if self.variances.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(invalid("prior variances must be positive"));
        }
        Ok(w.order()
            .iter()
            .enumerate()
            .map(|(p, &node)| self.variance(node) + if p >= w.r() { self.d } else { 0.0 })
            .collect())
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("lambda must lie in (0, 1], got {lambda}")))
    }
}
