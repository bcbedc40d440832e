//! Finite-horizon controllability of the regular block from one adversary.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::analysis::check_lambda;
use crate::dynamics::steady_operator;
use crate::error::{invalid, Error, Result};
use crate::graphkit::OperatedWeights;

/// `G_K = (1 - lambda)^2 sum_{k<K} (1 - lambda)^{2k} W_R^k W_m W_m^T (W_R^T)^k`.
#[derive(Clone, Debug)]
pub struct GramianReport {
    lambda: f64,
    horizon: usize,
    matrix: DMatrix<f64>,
    trace: f64,
}

#[derive(Serialize)]
struct ReportRecord {
    lambda: f64,
    #[serde(rename = "K")]
    horizon: usize,
    trace: f64,
}

impl GramianReport {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `G_K`, indexed by the regular nodes in ascending label order.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Controllability index `tr(G_K)`.
    pub fn trace(&self) -> f64 {
        self.trace
    }

    /// `{"lambda": .., "K": .., "trace": ..}`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ReportRecord {
            lambda: self.lambda,
            horizon: self.horizon,
            trace: self.trace,
        })?)
    }

    pub fn write_matrix_csv(&self, mut out: impl Write) -> Result<()> {
        for row in self.matrix.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

fn input_column(w: &OperatedWeights, m: usize) -> Result<DVector<f64>> {
    if m >= w.n() || !w.is_malicious(m) {
        return Err(Error::NotMalicious(m));
    }
    Ok(w.w12().column(w.position(m) - w.r()).into_owned())
}

/// Gramian of the channel from malicious node `m` into the regular nodes.
/// `horizon = None` uses `K = R`.
pub fn gramian(
    w: &OperatedWeights,
    lambda: f64,
    m: usize,
    horizon: Option<usize>,
) -> Result<GramianReport> {
    check_lambda(lambda)?;
    let k = horizon.unwrap_or(w.r());
    if k == 0 {
        return Err(invalid("horizon must be at least 1"));
    }
    let mut u = input_column(w, m)?;
    let a = w.w11() * (1.0 - lambda);
    let r = w.r();
    let mut matrix = DMatrix::zeros(r, r);
    for _ in 0..k {
        matrix.ger(1.0, &u, &u, 1.0);
        u = &a * u;
    }
    matrix *= (1.0 - lambda).powi(2);
    let trace = matrix.trace();
    Ok(GramianReport {
        lambda,
        horizon: k,
        matrix,
        trace,
    })
}

/// `tr(G_K)` as `(1 - lambda)^2 sum_k ||u_k||^2` without forming `G_K`.
pub fn controllability_index(
    w: &OperatedWeights,
    lambda: f64,
    m: usize,
    horizon: Option<usize>,
) -> Result<f64> {
    check_lambda(lambda)?;
    let k = horizon.unwrap_or(w.r());
    if k == 0 {
        return Err(invalid("horizon must be at least 1"));
    }
    let mut u = input_column(w, m)?;
    let a = w.w11() * (1.0 - lambda);
    let mut total = 0.0;
    for _ in 0..k {
        total += u.norm_squared();
        u = &a * u;
    }
    Ok((1.0 - lambda).powi(2) * total)
}

/// `||L_m^{-m}||^2`: squared norm of column `m` of `L` on the regular rows.
pub fn collaboration_norm(w: &OperatedWeights, lambda: f64, m: usize) -> Result<f64> {
    input_column(w, m)?;
    let l = steady_operator(w, lambda)?;
    Ok(l.matrix()
        .view((0, w.position(m)), (w.r(), 1))
        .norm_squared())
}
