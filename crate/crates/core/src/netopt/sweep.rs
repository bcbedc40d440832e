use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{worst_case_node, MetricKind};
use crate::error::{invalid, Result};
use crate::graphkit::{gen_regular, uniform_weights};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub degree: usize,
    pub avg_worst_error: f64,
    pub avg_worst_contr_index: f64,
    pub trials: usize,
}

/// Averages of the worst-case consensus error and controllability index
/// over `trials` random `delta`-regular graphs per degree.
pub fn degree_sweep(
    n: usize,
    degrees: &[usize],
    trials: usize,
    lambda: f64,
    d: f64,
    horizon: Option<usize>,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if trials == 0 {
        return Err(invalid("need at least one trial"));
    }
    let error = MetricKind::ConsensusError { lambda, d };
    let index = MetricKind::ControllabilityIndex { lambda, horizon };
    degrees
        .iter()
        .map(|&degree| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(degree as u64);
            let seeds: Vec<u64> = (0..trials).map(|_| rng.next_u64()).collect();
            let pairs: Vec<(f64, f64)> = seeds
                .par_iter()
                .map(|&s| {
                    let w = uniform_weights(&gen_regular(n, degree, s)?)?;
                    Ok((worst_case_node(&w, error)?.1, worst_case_node(&w, index)?.1))
                })
                .collect::<Result<_>>()?;
            let t = trials as f64;
            Ok(SweepRow {
                degree,
                avg_worst_error: pairs.iter().map(|p| p.0).sum::<f64>() / t,
                avg_worst_contr_index: pairs.iter().map(|p| p.1).sum::<f64>() / t,
                trials,
            })
        })
        .collect()
}

/// Columns `degree,avg_worst_error,avg_worst_contr_index,trials`.
pub fn write_sweep_csv(rows: &[SweepRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "degree,avg_worst_error,avg_worst_contr_index,trials")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.degree, r.avg_worst_error, r.avg_worst_contr_index, r.trials
        )?;
    }
    Ok(())
}
