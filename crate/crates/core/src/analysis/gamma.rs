use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::PriorCovariance;
use crate::error::{Error, Result};
use crate::graphkit::OperatedWeights;

const MAX_CONDITION: f64 = 1e12;

/// Small-`lambda` behavior of the steady-state operator.
///
/// `W'` is diagonalized as `V diag(lambda_i) V^{-1}` with
/// `V = [[Q, (I - W11)^{-1} W12], [0, I_M]]`, where `Q` holds the
/// eigenvectors of the symmetric block `W11`. Then
/// `Gamma = lim dL/dlambda = V diag(sigma_bar) V^{-1}` with
/// `sigma_bar_i = 1 / (1 - lambda_i)` on the regular block and 0 on the
/// unit eigenvalues, and `lim L = W_bar`.
#[derive(Clone, Debug)]
pub struct GammaDecomposition {
    r: usize,
    gamma: DMatrix<f64>,
    w_bar: DMatrix<f64>,
    eigenvectors: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    sigma_bar: DVector<f64>,
    condition: f64,
}

impl GammaDecomposition {
    /// `Gamma` in block order.
    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    /// `Gamma_1 = (I - W11)^{-1}`, `R x R`.
    pub fn gamma1(&self) -> DMatrix<f64> {
        self.gamma.view((0, 0), (self.r, self.r)).into_owned()
    }

    /// `Gamma_2 = -(I - W11)^{-2} W12`, `R x M`.
    pub fn gamma2(&self) -> DMatrix<f64> {
        let n = self.gamma.nrows();
        self.gamma
            .view((0, self.r), (self.r, n - self.r))
            .into_owned()
    }

    /// `lim_{lambda -> 0} L` in block order.
    pub fn w_bar(&self) -> &DMatrix<f64> {
        &self.w_bar
    }

    /// Upper-right block of `W_bar`: absorption weights of each malicious
    /// node seen from each regular node.
    pub fn w_bar12(&self) -> DMatrix<f64> {
        let n = self.w_bar.nrows();
        self.w_bar
            .view((0, self.r), (self.r, n - self.r))
            .into_owned()
    }

    /// Columns are eigenvectors of `W'` (block order).
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn sigma_bar(&self) -> &DVector<f64> {
        &self.sigma_bar
    }

    /// Condition number of `I - W11`.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `V diag(values) V^{-1}`, with `V^{-1}` from a generic LU inverse.
    pub fn reconstruct(&self, values: &DVector<f64>) -> Result<DMatrix<f64>> {
        let inv = self
            .eigenvectors
            .clone()
            .try_inverse()
            .ok_or(Error::Singular)?;
        Ok(&self.eigenvectors * DMatrix::from_diagonal(values) * inv)
    }
}

pub fn gamma_and_limits(w: &OperatedWeights) -> Result<GammaDecomposition> {
    let (n, r, m) = (w.n(), w.r(), w.m());
    let eig = SymmetricEigen::new(w.w11());
    let gaps = eig.eigenvalues.map(|mu| 1.0 - mu);
    let (lo, hi) = (gaps.min(), gaps.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned(condition));
    }
    let q = &eig.eigenvectors;
    let inv_gap = gaps.map(|g| 1.0 / g);
    // (I - W11)^{-1}
    let p = q * DMatrix::from_diagonal(&inv_gap) * q.transpose();
    let b = &p * w.w12();
    let pb = &p * &b;

    let mut eigenvectors = DMatrix::identity(n, n);
    eigenvectors.view_mut((0, 0), (r, r)).copy_from(q);
    eigenvectors.view_mut((0, r), (r, m)).copy_from(&b);
    let eigenvalues = DVector::from_fn(n, |i, _| if i < r { eig.eigenvalues[i] } else { 1.0 });
    let sigma_bar = DVector::from_fn(n, |i, _| if i < r { inv_gap[i] } else { 0.0 });

    let mut gamma = DMatrix::zeros(n, n);
    gamma.view_mut((0, 0), (r, r)).copy_from(&p);
    gamma.view_mut((0, r), (r, m)).copy_from(&(-pb));
    let mut w_bar = DMatrix::zeros(n, n);
    w_bar.view_mut((0, r), (r, m)).copy_from(&b);
    w_bar.view_mut((r, r), (m, m)).fill_with_identity();

    Ok(GammaDecomposition {
        r,
        gamma,
        w_bar,
        eigenvectors,
        eigenvalues,
        sigma_bar,
        condition,
    })
}

/// `tr(-Gamma_1^T C_R) + tr(Gamma_2^T W_bar12)`: limit of the derivative
/// expression as `lambda -> 0` for unit prior variances and noise-free
/// priors. With a single adversary `W_bar12` is the all-ones column.
pub fn derivative_limit_zero(g: &GammaDecomposition, w: &OperatedWeights) -> f64 {
    let r = w.r() as f64;
    let g1 = g.gamma1();
    let g2 = g.gamma2();
    -g1.sum() / r + g2.component_mul(&g.w_bar12()).sum()
}

/// Limit of the derivative expression for a general prior covariance:
/// `tr(Sigma Gamma^T S_R^T (S_R W_bar - C_R S_R))`.
pub fn derivative_limit_zero_noisy(
    g: &GammaDecomposition,
    w: &OperatedWeights,
    cov: &PriorCovariance,
) -> Result<f64> {
    let sigma = cov.block_diagonal(w)?;
    let r = w.r();
    let gamma = g.gamma();
    let w_bar = g.w_bar();
    let mut total = 0.0;
    for (j, s) in sigma.iter().enumerate() {
        let centering = if j < r { 1.0 / r as f64 } else { 0.0 };
        let col: f64 = (0..r)
            .map(|i| gamma[(i, j)] * (w_bar[(i, j)] - centering))
            .sum();
        total += s * col;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::error_derivative;
    use crate::dynamics::steady_operator;
    use crate::graphkit::{apply_malicious, gen_regular, uniform_weights, Topology};

    fn c4() -> OperatedWeights {
        apply_malicious(&uniform_weights(&Topology::cycle(4)).unwrap(), &[3]).unwrap()
    }

    #[test]
    fn c4_signs_and_limits() {
        let g = gamma_and_limits(&c4()).unwrap();
        assert!(g.gamma1().iter().all(|&v| v > 0.0));
        assert!(g.gamma2().iter().all(|&v| v < 0.0));
        for row in g.w_bar().row_iter() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
        assert!(g.gamma().rows(3, 1).iter().all(|&v| v == 0.0));
        assert!(derivative_limit_zero(&g, &c4()) < 0.0);
    }

    #[test]
    fn reconstructs_w_and_gamma() {
        let w = apply_malicious(
            &uniform_weights(&gen_regular(30, 3, 2).unwrap()).unwrap(),
            &[4, 21],
        )
        .unwrap();
        let g = gamma_and_limits(&w).unwrap();
        let w_rec = g.reconstruct(g.eigenvalues()).unwrap();
        assert!((w_rec - w.permuted()).amax() < 1e-10);
        let gamma_rec = g.reconstruct(g.sigma_bar()).unwrap();
        assert!((gamma_rec - g.gamma()).amax() < 1e-9);
    }

    fn forward_difference(w: &OperatedWeights, h: f64) -> DMatrix<f64> {
        (steady_operator(w, 2.0 * h).unwrap().matrix() - steady_operator(w, h).unwrap().matrix())
            / h
    }

    #[test]
    fn matches_finite_difference_of_l() {
        let g = gamma_and_limits(&c4()).unwrap();
        assert!((forward_difference(&c4(), 1e-5) - g.gamma()).amax() < 1e-3);

        // the forward difference carries a bias of 1.5 h L''(0); one
        // Richardson step removes it
        let w = apply_malicious(
            &uniform_weights(&gen_regular(20, 3, 6).unwrap()).unwrap(),
            &[0],
        )
        .unwrap();
        let g = gamma_and_limits(&w).unwrap();
        let h = 1e-5;
        let extrapolated = forward_difference(&w, h / 2.0) * 2.0 - forward_difference(&w, h);
        let rel = (extrapolated - g.gamma()).amax() / g.gamma().amax();
        assert!(rel < 1e-5, "{rel}");
    }

    #[test]
    fn limits_match_small_lambda() {
        let w = apply_malicious(
            &uniform_weights(&gen_regular(20, 3, 9).unwrap()).unwrap(),
            &[2, 11],
        )
        .unwrap();
        let g = gamma_and_limits(&w).unwrap();
        let near = error_derivative(&w, 1e-6, &PriorCovariance::unit(0.0)).unwrap();
        let lim = derivative_limit_zero(&g, &w);
        assert!(((near - lim) / lim).abs() < 1e-3, "{near} vs {lim}");
        for d in [0.0, 10.0, 100.0] {
            let cov = PriorCovariance::unit(d);
            let near = error_derivative(&w, 1e-6, &cov).unwrap();
            let lim = derivative_limit_zero_noisy(&g, &w, &cov).unwrap();
            assert!(((near - lim) / lim).abs() < 1e-3, "d={d}: {near} vs {lim}");
            assert!(lim < 0.0);
        }
    }

    #[test]
    fn single_adversary_w_bar_is_ones() {
        let g = gamma_and_limits(&c4()).unwrap();
        assert!(g.w_bar12().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }
}
