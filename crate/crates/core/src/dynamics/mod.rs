//! Trajectory simulation and the FJ steady-state operator.

mod compare;
mod montecarlo;
mod scenario;
mod simulate;
mod wmsr;

pub use compare::{compare_dynamics, Comparison, ComparisonStep};
pub use montecarlo::{monte_carlo_error, sample_corrupted_priors, McEstimate};
pub use scenario::Scenario;
pub use simulate::{
    best_response, simulate_consensus, simulate_fj, SimOptions, Trajectory, DEFAULT_HORIZON,
    DEFAULT_TOL,
};
pub use wmsr::simulate_wmsr;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::graphkit::OperatedWeights;

/// `L = lambda (I - (1 - lambda) W')^{-1}` in block order, with
/// `L = [[L11, L12], [0, I_M]]`.
#[derive(Clone, Debug)]
pub struct SteadyOperator {
    lambda: f64,
    r: usize,
    matrix: DMatrix<f64>,
}

impl SteadyOperator {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Full operator in block order.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn l11(&self) -> DMatrix<f64> {
        self.matrix.view((0, 0), (self.r, self.r)).into_owned()
    }

    pub fn l12(&self) -> DMatrix<f64> {
        let n = self.matrix.nrows();
        self.matrix
            .view((0, self.r), (self.r, n - self.r))
            .into_owned()
    }

    /// Operator re-indexed by node label.
    pub fn in_label_order(&self, w: &OperatedWeights) -> DMatrix<f64> {
        let n = self.matrix.nrows();
        DMatrix::from_fn(n, n, |i, j| self.matrix[(w.position(i), w.position(j))])
    }

    /// Steady state `L theta` for block-ordered corrupted priors.
    pub fn apply(&self, priors_block: &[f64]) -> Vec<f64> {
        let n = self.matrix.nrows();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)] * priors_block[j]).sum())
            .collect()
    }
}

pub fn steady_operator(w: &OperatedWeights, lambda: f64) -> Result<SteadyOperator> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(invalid(format!(
            "lambda must lie in (0, 1], got {lambda}; use the limit operator for lambda = 0"
        )));
    }
    let (n, r) = (w.n(), w.r());
    let mut matrix = DMatrix::identity(n, n);
    if lambda < 1.0 {
        // only the regular rows need solving; the malicious rows stay e_m
        let system = DMatrix::identity(r, r) - w.w11() * (1.0 - lambda);
        let mut rhs = DMatrix::zeros(r, n);
        rhs.view_mut((0, 0), (r, r)).fill_diagonal(lambda);
        rhs.view_mut((0, r), (r, n - r))
            .copy_from(&(w.w12() * (1.0 - lambda)));
        let top = system.lu().solve(&rhs).ok_or(Error::Singular)?;
        matrix.view_mut((0, 0), (r, n)).copy_from(&top);
    }
    Ok(SteadyOperator {
        lambda,
        r: w.r(),
        matrix,
    })
}
