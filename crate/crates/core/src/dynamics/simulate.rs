use std::io::Write;

use crate::error::{invalid, Result};
use crate::graphkit::WeightMatrix;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_HORIZON: usize = 100_000;

#[derive(Clone, Copy, Debug)]
pub struct SimOptions {
    pub horizon: usize,
    /// Stop once the max-norm change of one step drops below this.
    pub tol: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            horizon: DEFAULT_HORIZON,
            tol: DEFAULT_TOL,
        }
    }
}

/// States `x(0), x(1), ...` in label order.
#[derive(Clone, Debug)]
pub struct Trajectory {
    states: Vec<Vec<f64>>,
    converged: bool,
}

impl Trajectory {
    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn terminal(&self) -> &[f64] {
        self.states.last().expect("trajectory holds x(0)")
    }

    /// Columns `step,node_1..node_n`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let n = self.states[0].len();
        let header: Vec<String> = std::iter::once("step".to_string())
            .chain((1..=n).map(|i| format!("node_{i}")))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (k, x) in self.states.iter().enumerate() {
            let row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{k},{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Runs `step` from `initial` until the state settles or the horizon is hit.
pub(crate) fn iterate(
    initial: Vec<f64>,
    opts: SimOptions,
    mut step: impl FnMut(&[f64], &mut [f64]),
) -> Trajectory {
    let mut states = vec![initial];
    let mut converged = false;
    for _ in 0..opts.horizon {
        let current = states.last().unwrap();
        let mut next = current.clone();
        step(current, &mut next);
        let change = current
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        states.push(next);
        if change < opts.tol {
            converged = true;
            break;
        }
    }
    Trajectory { states, converged }
}

fn check_inputs(w: &WeightMatrix, priors: &[f64], malicious: &[usize]) -> Result<Vec<bool>> {
    let n = w.n();
    if priors.len() != n {
        return Err(invalid(format!(
            "expected {n} priors, got {}",
            priors.len()
        )));
    }
    if priors.iter().any(|p| !p.is_finite()) {
        return Err(invalid("priors must be finite"));
    }
    let mut mask = vec![false; n];
    for &m in malicious {
        if m >= n {
            return Err(invalid(format!("unknown node {}", m + 1)));
        }
        mask[m] = true;
    }
    Ok(mask)
}

/// FJ dynamics `x_i <- lambda theta_i + (1 - lambda) sum_j W_ij x_j` from
/// `x(0) = theta`. Malicious nodes keep their (corrupted) prior.
pub fn simulate_fj(
    w: &WeightMatrix,
    malicious: &[usize],
    priors: &[f64],
    lambda: f64,
    opts: SimOptions,
) -> Result<Trajectory> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(invalid(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    let frozen = check_inputs(w, priors, malicious)?;
    let t = w.topology();
    Ok(iterate(priors.to_vec(), opts, |x, next| {
        for i in 0..x.len() {
            if frozen[i] {
                continue;
            }
            let mix: f64 = t.neighbors(i).iter().map(|&j| w.get(i, j) * x[j]).sum();
            next[i] = lambda * priors[i] + (1.0 - lambda) * mix;
        }
    }))
}

/// Plain consensus, the `lambda = 0` case.
pub fn simulate_consensus(
    w: &WeightMatrix,
    malicious: &[usize],
    priors: &[f64],
    opts: SimOptions,
) -> Result<Trajectory> {
    simulate_fj(w, malicious, priors, 0.0, opts)
}

/// Maximizer of `-lambda (x_i - theta_i)^2 - (1 - lambda) sum_j W_ij (x_i - x_j)^2`.
pub fn best_response(i: usize, x: &[f64], priors: &[f64], lambda: f64, w: &WeightMatrix) -> f64 {
    let mix: f64 = w
        .topology()
        .neighbors(i)
        .iter()
        .map(|&j| w.get(i, j) * x[j])
        .sum();
    lambda * priors[i] + (1.0 - lambda) * mix
}
