use std::io::Write;

use rayon::prelude::*;

use super::montecarlo::{sample_corrupted_priors, trial_rng};
use super::{simulate_consensus, simulate_fj, simulate_wmsr, Scenario, SimOptions, Trajectory};
use crate::error::{invalid, Result};
use crate::graphkit::WeightMatrix;

/// Trial-averaged error and network cost of the regular nodes at one step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComparisonStep {
    pub consensus_error: f64,
    pub fj_error: f64,
    pub wmsr_error: f64,
    pub consensus_cost: f64,
    pub fj_cost: f64,
    pub wmsr_cost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub lambda: f64,
    pub f: usize,
    pub trials: usize,
    /// Steps `0..=horizon`.
    pub steps: Vec<ComparisonStep>,
}

impl Comparison {
    pub fn terminal(&self) -> &ComparisonStep {
        self.steps.last().expect("at least step 0")
    }

    /// Columns `step,consensus_error,fj_error,wmsr_error,consensus_cost,fj_cost,wmsr_cost`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(
            out,
            "step,consensus_error,fj_error,wmsr_error,consensus_cost,fj_cost,wmsr_cost"
        )?;
        for (k, s) in self.steps.iter().enumerate() {
            writeln!(
                out,
                "{k},{},{},{},{},{},{}",
                s.consensus_error,
                s.fj_error,
                s.wmsr_error,
                s.consensus_cost,
                s.fj_cost,
                s.wmsr_cost
            )?;
        }
        Ok(())
    }
}

// (error, cost) of the regular states at every step, holding the terminal
// state once a run has settled early.
fn score(tr: &Trajectory, regular: &[usize], theta: &[f64], horizon: usize) -> Vec<(f64, f64)> {
    let r = regular.len() as f64;
    let mean = regular.iter().map(|&i| theta[i]).sum::<f64>() / r;
    let spread: f64 = regular.iter().map(|&i| (theta[i] - mean).powi(2)).sum();
    (0..=horizon)
        .map(|k| {
            let x = &tr.states()[k.min(tr.steps())];
            let err: f64 = regular.iter().map(|&i| (x[i] - mean).powi(2)).sum();
            // sum_i (1/R) sum_j (x_i - theta_j)^2 = err + sum_j (theta_j - mean)^2
            (err, err + spread)
        })
        .collect()
}

/// Runs consensus, FJ at `lambda` and W-MSR with trim `f` from the same
/// corrupted priors for `trials` draws and averages the per-step error and
/// cost.
pub fn compare_dynamics(
    w: &WeightMatrix,
    sc: &Scenario,
    lambda: f64,
    f: usize,
    horizon: usize,
    trials: usize,
) -> Result<Comparison> {
    if trials == 0 || horizon == 0 {
        return Err(invalid("need at least one trial and one step"));
    }
    if sc.n() != w.n() {
        return Err(invalid("scenario and graph sizes differ"));
    }
    let regular = sc.regular();
    let fixed = SimOptions { horizon, tol: 0.0 };
    let per_trial: Vec<Vec<[(f64, f64); 3]>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(sc.seed(), t);
            let (theta, corrupted) = sample_corrupted_priors(sc, &mut rng);
            let runs = [
                simulate_consensus(w, sc.malicious(), &corrupted, fixed)?,
                simulate_fj(w, sc.malicious(), &corrupted, lambda, fixed)?,
                simulate_wmsr(w, &corrupted, sc.malicious(), f, horizon)?,
            ];
            let scored: Vec<Vec<(f64, f64)>> = runs
                .iter()
                .map(|tr| score(tr, &regular, &theta, horizon))
                .collect();
            Ok((0..=horizon)
                .map(|k| [scored[0][k], scored[1][k], scored[2][k]])
                .collect())
        })
        .collect::<Result<_>>()?;
    let n = trials as f64;
    let steps = (0..=horizon)
        .map(|k| {
            let mut s = ComparisonStep::default();
            for trial in &per_trial {
                let [c, fj, wm] = trial[k];
                s.consensus_error += c.0 / n;
                s.fj_error += fj.0 / n;
                s.wmsr_error += wm.0 / n;
                s.consensus_cost += c.1 / n;
                s.fj_cost += fj.1 / n;
                s.wmsr_cost += wm.1 / n;
            }
            s
        })
        .collect();
    Ok(Comparison {
        lambda,
        f,
        trials,
        steps,
    })
}
