use itertools::Itertools;
use rayon::prelude::*;

use super::{node_metrics, pick, MetricKind};
use crate::analysis::{
    error_closed_form, lambda_grid, refine_minimum, ErrorSpectrum, PriorCovariance,
    DEFAULT_GRID_SIZE, DEFAULT_LAMBDA_TOL, LAMBDA_LO,
};
use crate::error::{invalid, Error, Result};
use crate::graphkit::{apply_malicious, WeightMatrix};

pub const DEFAULT_SUBSET_LIMIT: u128 = 100_000;
/// Above this many stored spectral coefficients (subsets times `R`), each
/// lambda is evaluated from scratch instead.
const SPECTRA_BUDGET: u128 = 1_000_000;

/// Solution of `min_lambda max_{|M| = m} e_R`.
#[derive(Clone, Debug, PartialEq)]
pub struct WorstCaseDesign {
    pub lambda: f64,
    /// Maximizing adversary set at `lambda`, ascending labels.
    pub worst_subset: Vec<usize>,
    pub value: f64,
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

/// Worst-case error over all adversary sets of size `m_count` at `lambda`,
/// with the maximizing set.
fn worst_subset(
    w: &WeightMatrix,
    m_count: usize,
    lambda: f64,
    cov: &PriorCovariance,
) -> Result<(Vec<usize>, f64)> {
    if m_count == 1 {
        let values = node_metrics(w, MetricKind::ConsensusError { lambda, d: cov.d() })?;
        let k = pick(&values, true).ok_or(Error::Singular)?;
        return Ok((vec![k], values[k]));
    }
    let subsets: Vec<Vec<usize>> = (0..w.n()).combinations(m_count).collect();
    let values: Vec<f64> = subsets
        .par_iter()
        .map(|s| error_closed_form(&apply_malicious(w, s)?, lambda, cov))
        .collect::<Result<_>>()?;
    let k = pick(&values, true).ok_or(Error::Singular)?;
    Ok((subsets[k].clone(), values[k]))
}

/// Lambda minimizing the largest error any `m_count` adversaries can cause
/// (unit prior variances, noise variance `d`). Single adversaries are found
/// by a scan over nodes; larger sets by exhaustive enumeration, capped at
/// `subset_limit` sets.
pub fn worst_case_lambda(
    w: &WeightMatrix,
    m_count: usize,
    d: f64,
    subset_limit: u128,
) -> Result<WorstCaseDesign> {
    let n = w.n();
    if m_count == 0 || m_count >= n {
        return Err(invalid(format!("need 1 <= m_count < {n}, got {m_count}")));
    }
    let subsets = binomial(n, m_count);
    if subsets > subset_limit {
        return Err(Error::SubsetBudget {
            subsets,
            limit: subset_limit,
        });
    }
    let cov = PriorCovariance::unit(d);
    let grid = lambda_grid(LAMBDA_LO, 1.0 - LAMBDA_LO, DEFAULT_GRID_SIZE);
    let (lambda, worst_subset, value) = if subsets * (n - m_count) as u128 <= SPECTRA_BUDGET {
        let sets: Vec<Vec<usize>> = (0..n).combinations(m_count).collect();
        let spectra: Vec<ErrorSpectrum> = sets
            .par_iter()
            .map(|s| ErrorSpectrum::new(&apply_malicious(w, s)?, &cov))
            .collect::<Result<_>>()?;
        let at = |lambda: f64| -> Result<(usize, f64)> {
            let values: Vec<f64> = spectra
                .iter()
                .map(|sp| sp.error(lambda))
                .collect::<Result<_>>()?;
            let k = pick(&values, true).ok_or(Error::Singular)?;
            Ok((k, values[k]))
        };
        let values: Vec<f64> = grid
            .par_iter()
            .map(|&l| at(l).map(|p| p.1))
            .collect::<Result<_>>()?;
        let (lambda, _) =
            refine_minimum(|l| at(l).map(|p| p.1), &grid, &values, DEFAULT_LAMBDA_TOL)?;
        let (k, value) = at(lambda)?;
        (lambda, sets[k].clone(), value)
    } else {
        let worst = |lambda: f64| worst_subset(w, m_count, lambda, &cov).map(|(_, v)| v);
        let values: Vec<f64> = grid.iter().map(|&l| worst(l)).collect::<Result<_>>()?;
        let (lambda, _) = refine_minimum(worst, &grid, &values, DEFAULT_LAMBDA_TOL)?;
        let (subset, value) = worst_subset(w, m_count, lambda, &cov)?;
        (lambda, subset, value)
    };
    Ok(WorstCaseDesign {
        lambda,
        worst_subset,
        value,
    })
}
