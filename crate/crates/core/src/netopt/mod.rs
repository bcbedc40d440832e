//! Worst-case adversary placement and topology hardening.

mod design;
mod greedy;
mod sweep;

pub use design::{worst_case_lambda, WorstCaseDesign, DEFAULT_SUBSET_LIMIT};
pub use greedy::{
    greedy_edge_removal, matching_prune, RemovalStep, RemovalTrace, SkipReason, SkippedCandidate,
};
pub use sweep::{degree_sweep, write_sweep_csv, SweepRow};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::analysis::{check_lambda, error_closed_form, PriorCovariance};
use crate::control::controllability_index;
use crate::error::{invalid, Error, Result};
use crate::graphkit::{apply_malicious, WeightMatrix};

/// Relative slack under which two metric values count as tied.
pub const TIE_RTOL: f64 = 1e-9;

/// Objective evaluated with a single adversary at some node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MetricKind {
    /// `e_R` with unit prior variances.
    ConsensusError { lambda: f64, d: f64 },
    /// `tr(G_K)`; `horizon = None` means `K = R`.
    ControllabilityIndex { lambda: f64, horizon: Option<usize> },
}

impl MetricKind {
    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::ConsensusError { .. } => "consensus_error",
            MetricKind::ControllabilityIndex { .. } => "controllability_index",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            MetricKind::ConsensusError { lambda, d } => {
                check_lambda(lambda)?;
                if !(d >= 0.0 && d.is_finite()) {
                    return Err(invalid(format!("noise variance must be >= 0, got {d}")));
                }
            }
            MetricKind::ControllabilityIndex { lambda, horizon } => {
                check_lambda(lambda)?;
                if horizon == Some(0) {
                    return Err(invalid("horizon must be at least 1"));
                }
            }
        }
        Ok(())
    }

    /// Metric with `node` as the only adversary, evaluated from scratch.
    pub fn evaluate(&self, w: &WeightMatrix, node: usize) -> Result<f64> {
        let op = apply_malicious(w, &[node])?;
        match *self {
            MetricKind::ConsensusError { lambda, d } => {
                error_closed_form(&op, lambda, &PriorCovariance::unit(d))
            }
            MetricKind::ControllabilityIndex { lambda, horizon } => {
                controllability_index(&op, lambda, node, horizon)
            }
        }
    }
}

/// Metric value for every node as the single adversary.
pub fn node_metrics(w: &WeightMatrix, metric: MetricKind) -> Result<Vec<f64>> {
    metric.validate()?;
    if w.n() < 2 {
        return Err(invalid("need at least two nodes"));
    }
    match metric {
        MetricKind::ConsensusError { lambda, d } => error_scan(w, lambda, d),
        MetricKind::ControllabilityIndex { lambda, horizon } => {
            Ok(index_scan(w, lambda, horizon.unwrap_or(w.n() - 1)))
        }
    }
}

// With B = (I - (1 - lambda) W)^{-1}, removing node m from the system is a
// rank-one downdate: (A_{-m,-m})^{-1} = B_{-m,-m} - B_{-m,m} B_{m,-m} / B_mm.
fn error_scan(w: &WeightMatrix, lambda: f64, d: f64) -> Result<Vec<f64>> {
    let n = w.n();
    let r = (n - 1) as f64;
    let a = DMatrix::identity(n, n) - w.entries() * (1.0 - lambda);
    let b = a.try_inverse().ok_or(Error::Singular)?;
    Ok((0..n)
        .into_par_iter()
        .map(|m| {
            let bmm = b[(m, m)];
            let mut competition = 0.0;
            let mut l12 = vec![0.0; n];
            for j in (0..n).filter(|&j| j != m) {
                let factor = b[(m, j)] / bmm;
                let wjm = w.get(j, m) * (1.0 - lambda);
                for i in (0..n).filter(|&i| i != m) {
                    let x = b[(i, j)] - b[(i, m)] * factor;
                    competition += (lambda * x - 1.0 / r).powi(2);
                    l12[i] += x * wjm;
                }
            }
            let collaboration: f64 = l12.iter().map(|v| v * v).sum();
            competition + (1.0 + d) * collaboration
        })
        .collect())
}

fn index_scan(w: &WeightMatrix, lambda: f64, horizon: usize) -> Vec<f64> {
    let n = w.n();
    let t = w.topology();
    let scale = 1.0 - lambda;
    (0..n)
        .into_par_iter()
        .map(|m| {
            let mut u: Vec<f64> = (0..n)
                .map(|i| if i == m { 0.0 } else { w.get(i, m) })
                .collect();
            let mut next = vec![0.0; n];
            let mut total = 0.0;
            for _ in 0..horizon {
                total += u.iter().map(|v| v * v).sum::<f64>();
                for i in 0..n {
                    next[i] = if i == m {
                        0.0
                    } else {
                        scale
                            * t.neighbors(i)
                                .iter()
                                .map(|&j| w.get(i, j) * u[j])
                                .sum::<f64>()
                    };
                }
                std::mem::swap(&mut u, &mut next);
            }
            scale * scale * total
        })
        .collect()
}

/// First index whose value is within [`TIE_RTOL`] of the best one.
pub(crate) fn pick(values: &[f64], maximize: bool) -> Option<usize> {
    let best = if maximize {
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        values.iter().copied().fold(f64::INFINITY, f64::min)
    };
    if !best.is_finite() {
        return None;
    }
    let slack = TIE_RTOL * best.abs().max(1.0);
    values.iter().position(|&v| {
        if maximize {
            v >= best - slack
        } else {
            v <= best + slack
        }
    })
}

/// The adversary placement that maximizes the metric; ties go to the
/// lowest node.
pub fn worst_case_node(w: &WeightMatrix, metric: MetricKind) -> Result<(usize, f64)> {
    let values = node_metrics(w, metric)?;
    let node = pick(&values, true).ok_or(Error::Singular)?;
    Ok((node, values[node]))
}
