use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::{steady_operator, Scenario};
use crate::error::{invalid, Result};
use crate::graphkit::OperatedWeights;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Draws `(theta, theta_tilde)` in label order: normal priors with the
/// scenario variances, plus normal noise of variance `d` on malicious nodes.
pub fn sample_corrupted_priors(sc: &Scenario, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let theta: Vec<f64> = sc
        .variances()
        .iter()
        .map(|&v| {
            Normal::new(0.0, v.sqrt())
                .expect("positive variance")
                .sample(rng)
        })
        .collect();
    let mut corrupted = theta.clone();
    if sc.d() > 0.0 {
        let noise = Normal::new(0.0, sc.d().sqrt()).expect("finite noise");
        for &m in sc.malicious() {
            corrupted[m] += noise.sample(rng);
        }
    }
    (theta, corrupted)
}

/// RNG for trial `trial` of a run seeded with `seed`; independent of how
/// trials are scheduled.
pub(crate) fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Sample mean of `sum_{i in R} (x_i - mean_R(theta))^2` at the FJ steady state.
pub fn monte_carlo_error(
    w: &OperatedWeights,
    lambda: f64,
    sc: &Scenario,
    trials: usize,
) -> Result<McEstimate> {
    if trials < 2 {
        return Err(invalid("need at least 2 trials"));
    }
    if sc.n() != w.n() || sc.malicious() != w.malicious() {
        return Err(invalid(
            "scenario and weights disagree on the malicious set",
        ));
    }
    let l = steady_operator(w, lambda)?;
    let regular = w.regular();
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(sc.seed(), t);
            let (theta, corrupted) = sample_corrupted_priors(sc, &mut rng);
            let x = l.apply(&w.to_block_order(&corrupted));
            let target = regular.iter().map(|&i| theta[i]).sum::<f64>() / regular.len() as f64;
            // regular nodes occupy the first R block positions
            x[..regular.len()]
                .iter()
                .map(|v| (v - target).powi(2))
                .sum()
        })
        .collect();
    let n = trials as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(McEstimate {
        mean,
        std_error: (var / n).sqrt(),
        trials,
    })
}
