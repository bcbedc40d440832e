//! Self-check suite: invariants and independent oracles on small instances.

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    decompose_error, derivative_at_one, derivative_limit_zero, derivative_ratio, error_closed_form,
    error_derivative, error_partial_d, gamma_and_limits, PriorCovariance,
};
use crate::control::gramian;
use crate::dynamics::{
    monte_carlo_error, simulate_fj, simulate_wmsr, steady_operator, Scenario, SimOptions,
};
use crate::error::Result;
use crate::graphkit::{
    apply_malicious, gen_regular, max_matching, reweigh, uniform_weights, OperatedWeights, Topology,
};
use crate::netopt::{greedy_edge_removal, node_metrics, MetricKind};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<(bool, String)>;

fn cubic(n: usize, seed: u64, mal: &[usize]) -> Result<OperatedWeights> {
    apply_malicious(&uniform_weights(&gen_regular(n, 3, seed)?)?, mal)
}

fn weights(seed: u64) -> Outcome {
    let t = gen_regular(30, 4, seed)?;
    let a = reweigh(&t)?;
    let b = uniform_weights(&t)?;
    let gap = (a.entries() - b.entries()).amax();
    let defect = a.stochasticity_defect().max(a.symmetry_defect());
    Ok((
        gap <= 1e-10 && defect <= 1e-10,
        format!("reweigh gap {gap:.1e}, defect {defect:.1e}"),
    ))
}

fn matching(_: u64) -> Outcome {
    let m = max_matching(&Topology::petersen());
    let c5 = max_matching(&Topology::cycle(5));
    Ok((
        m.is_perfect() && c5.len() == 2,
        format!("petersen {}, C5 {}", m.len(), c5.len()),
    ))
}

fn fixed_point(seed: u64) -> Outcome {
    let op = cubic(40, seed, &[3, 20])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let priors: Vec<f64> = (0..40).map(|_| rng.random_range(-2.0..2.0)).collect();
    let tr = simulate_fj(
        op.base(),
        op.malicious(),
        &priors,
        0.4,
        SimOptions::default(),
    )?;
    let l = steady_operator(&op, 0.4)?;
    let x = op.to_label_order(&l.apply(&op.to_block_order(&priors)));
    let gap = tr
        .terminal()
        .iter()
        .zip(&x)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((tr.converged() && gap <= 1e-9, format!("max gap {gap:.1e}")))
}

fn full_competition(seed: u64) -> Outcome {
    let op = cubic(20, seed, &[1, 8])?;
    let e = error_closed_form(&op, 1.0, &PriorCovariance::unit(10.0))?;
    Ok(((e - 17.0).abs() <= 1e-10, format!("e_R(1) = {e}")))
}

fn affine_in_d(seed: u64) -> Outcome {
    let op = cubic(20, seed, &[5])?;
    let e0 = error_closed_form(&op, 0.3, &PriorCovariance::unit(0.0))?;
    let e1 = error_closed_form(&op, 0.3, &PriorCovariance::unit(1.0))?;
    let slope = error_partial_d(&op, 0.3)?;
    let gap = (e1 - e0 - slope).abs();
    Ok((gap <= 1e-10, format!("gap {gap:.1e}")))
}

fn derivative(seed: u64) -> Outcome {
    let op = cubic(20, seed, &[5])?;
    let cov = PriorCovariance::unit(10.0);
    let ratio = derivative_ratio(&op, 0.5, &cov, 1e-6)?;
    let at_one = error_derivative(&op, 1.0, &PriorCovariance::unit(0.0))?;
    let expected = derivative_at_one(&op);
    let limit = derivative_limit_zero(&gamma_and_limits(&op)?, &op);
    let ok = (ratio - 2.0).abs() <= 2e-5
        && (at_one - expected).abs() <= 1e-12
        && at_one > 0.0
        && limit < 0.0;
    Ok((
        ok,
        format!("ratio {ratio:.7}, at one {at_one:.4}, limit at zero {limit:.4}"),
    ))
}

fn decomposition(seed: u64) -> Outcome {
    let op = cubic(20, seed, &[5])?;
    let cov = PriorCovariance::unit(10.0);
    let dec = decompose_error(&op, 0.3, &cov)?;
    let gap = (dec.total() - error_closed_form(&op, 0.3, &cov)?).abs();
    Ok((gap <= 1e-10, format!("gap {gap:.1e}")))
}

fn gamma(seed: u64) -> Outcome {
    let op = cubic(20, seed, &[5, 14])?;
    let g = gamma_and_limits(&op)?;
    let w_gap = (g.reconstruct(g.eigenvalues())? - op.permuted()).amax();
    let g_gap = (g.reconstruct(g.sigma_bar())? - g.gamma()).amax();
    let signs = g.gamma1().iter().all(|&v| v > 0.0) && g.gamma2().iter().all(|&v| v < 0.0);
    Ok((
        w_gap <= 1e-10 && g_gap <= 1e-9 && signs,
        format!("W' gap {w_gap:.1e}, Gamma gap {g_gap:.1e}"),
    ))
}

fn gramian_check(_: u64) -> Outcome {
    let op = apply_malicious(&uniform_weights(&Topology::cycle(4))?, &[3])?;
    let k1 = gramian(&op, 0.1, 3, Some(1))?.trace();
    let g = gramian(&op, 0.1, 3, None)?;
    let min = SymmetricEigen::new(g.matrix().clone()).eigenvalues.min();
    Ok((
        (k1 - 0.405).abs() <= 1e-12 && min >= -1e-12,
        format!("K=1 trace {k1}, min eigenvalue {min:.1e}"),
    ))
}

fn greedy(seed: u64) -> Outcome {
    let w = uniform_weights(&gen_regular(12, 4, seed)?)?;
    let metric = MetricKind::ConsensusError {
        lambda: 0.7,
        d: 10.0,
    };
    let trace = greedy_edge_removal(&w, 2, metric)?;
    let first = trace.steps[0].edge;
    // rescan the first step by brute force
    let mut best = (f64::INFINITY, first);
    for e in w.topology().edges() {
        let t = w.topology().remove_edges(&[e])?;
        if !t.is_connected() {
            continue;
        }
        let Ok(wt) = reweigh(&t) else { continue };
        let v = node_metrics(&wt, metric)?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        if v < best.0 * (1.0 - 1e-9) {
            best = (v, e);
        }
    }
    let degrees_ok = trace.removal_counts.iter().all(|&c| c <= 1);
    Ok((
        best.1 == first && degrees_ok,
        format!("first removal {first}"),
    ))
}

fn monte_carlo(seed: u64) -> Outcome {
    let op = cubic(20, seed, &[19])?;
    let sc = Scenario::new(20, &[19], 10.0, seed)?;
    let est = monte_carlo_error(&op, 0.2, &sc, 4_000)?;
    let exact = error_closed_form(&op, 0.2, &sc.covariance())?;
    let z = (est.mean - exact) / est.std_error;
    Ok((
        z.abs() <= 3.0,
        format!(
            "estimate {:.4} +- {:.4}, exact {exact:.4}",
            est.mean, est.std_error
        ),
    ))
}

fn wmsr(seed: u64) -> Outcome {
    let w = uniform_weights(&gen_regular(100, 3, seed)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x0: Vec<f64> = (0..100).map(|_| rng.random_range(-1.0..1.0)).collect();
    x0[0] = 50.0;
    x0[50] = -50.0;
    let tr = simulate_wmsr(&w, &x0, &[0, 50], 2, 500)?;
    let regular = (1..100).filter(|&i| i != 50);
    let (lo, hi) = regular
        .clone()
        .map(|i| x0[i])
        .fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(v), b.max(v)));
    let inside = tr
        .states()
        .iter()
        .all(|x| regular.clone().all(|i| x[i] >= lo && x[i] <= hi));
    Ok((inside, format!("{} steps", tr.steps())))
}

/// Runs every check; a check that errors counts as failed.
pub fn run_suite(seed: u64) -> Vec<Check> {
    let checks: [(&'static str, fn(u64) -> Outcome); 13] = [
        ("weights", weights),
        ("matching", matching),
        ("fj_fixed_point", fixed_point),
        ("full_competition", full_competition),
        ("affine_in_d", affine_in_d),
        ("derivative", derivative),
        ("decomposition", decomposition),
        ("gamma", gamma),
        ("gramian", gramian_check),
        ("greedy", greedy),
        ("monte_carlo", monte_carlo),
        ("wmsr_hull", wmsr),
        ("dominance", |_| {
            use crate::analysis::{baseline_error, dominance_threshold, BaselineKind};
            let d = dominance_threshold(98, 2) + 1.0;
            let c = baseline_error(BaselineKind::ConsensusMalicious, 100, 98, 2, d)?;
            let f = baseline_error(BaselineKind::FjFullCompetition, 100, 98, 2, d)?;
            Ok((c > f, format!("consensus {c:.3} vs full competition {f}")))
        }),
    ];
    checks
        .iter()
        .map(|(name, f)| match f(seed) {
            Ok((passed, detail)) => Check {
                name,
                passed,
                detail,
            },
            Err(e) => Check {
                name,
                passed: false,
                detail: e.to_string(),
            },
        })
        .collect()
}
