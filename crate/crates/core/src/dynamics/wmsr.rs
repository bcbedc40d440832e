use super::simulate::{iterate, SimOptions, DEFAULT_TOL};
use super::Trajectory;
use crate::error::{invalid, Result};
use crate::graphkit::WeightMatrix;

/// W-MSR baseline.
///
/// Every step, each regular node drops up to `f` neighbor values strictly
/// above its own (largest first) and up to `f` strictly below (smallest
/// first), then takes the plain average of the retained neighbors and
/// itself. Malicious nodes hold their initial value. Only the support of
/// `w` is used.
pub fn simulate_wmsr(
    w: &WeightMatrix,
    initial: &[f64],
    malicious: &[usize],
    f: usize,
    horizon: usize,
) -> Result<Trajectory> {
    let n = w.n();
    if initial.len() != n {
        return Err(invalid(format!(
            "expected {n} initial values, got {}",
            initial.len()
        )));
    }
    let mut frozen = vec![false; n];
    for &m in malicious {
        if m >= n {
            return Err(invalid(format!("unknown node {}", m + 1)));
        }
        frozen[m] = true;
    }
    let t = w.topology();
    let opts = SimOptions {
        horizon,
        tol: DEFAULT_TOL,
    };
    Ok(iterate(initial.to_vec(), opts, |x, next| {
        let mut above = Vec::new();
        let mut below = Vec::new();
        for i in 0..n {
            if frozen[i] {
                continue;
            }
            let own = x[i];
            above.clear();
            below.clear();
            let mut sum = own;
            let mut count = 1usize;
            for &j in t.neighbors(i) {
                let v = x[j];
                if v > own {
                    above.push(v);
                } else if v < own {
                    below.push(v);
                } else {
                    sum += v;
                    count += 1;
                }
            }
            // keep all but the f largest above and the f smallest below
            above.sort_by(|a, b| a.total_cmp(b));
            below.sort_by(|a, b| b.total_cmp(a));
            for kept in [&above, &below] {
                let keep = kept.len().saturating_sub(f);
                sum += kept[..keep].iter().sum::<f64>();
                count += keep;
            }
            next[i] = sum / count as f64;
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphkit::{gen_regular, uniform_weights, Topology};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn no_trimming_is_consensus_with_self_weight() {
        let w = uniform_weights(&gen_regular(20, 3, 2).unwrap()).unwrap();
        let x0: Vec<f64> = (0..20).map(|i| ((i * 7) % 11) as f64).collect();
        let tr = simulate_wmsr(&w, &x0, &[5], 0, 50).unwrap();
        let mut x = x0.clone();
        for k in 1..=tr.steps() {
            let prev = x.clone();
            for i in 0..20 {
                if i == 5 {
                    continue;
                }
                let nb = w.topology().neighbors(i);
                x[i] = (prev[i] + nb.iter().map(|&j| prev[j]).sum::<f64>()) / (nb.len() + 1) as f64;
            }
            for i in 0..20 {
                assert!((tr.states()[k][i] - x[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn agreement_is_a_fixed_point() {
        let w = uniform_weights(&Topology::petersen()).unwrap();
        for f in 0..3 {
            let tr = simulate_wmsr(&w, &[0.7; 10], &[], f, 10).unwrap();
            assert!(tr.states().iter().all(|x| x.iter().all(|&v| v == 0.7)));
        }
    }

    #[test]
    fn trims_extremes() {
        // star-free toy: node 0 sees 1, 2 (above) and -5 (below)
        let t = Topology::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (1, 3)]).unwrap();
        let w = uniform_weights(&t).unwrap();
        let tr = simulate_wmsr(&w, &[0.0, 1.0, 2.0, -5.0], &[1, 2, 3], 1, 1).unwrap();
        // drops 2 and -5, keeps 1 and itself
        assert_eq!(tr.states()[1][0], 0.5);
    }

    #[test]
    fn regular_states_stay_in_the_hull() {
        let w = uniform_weights(&gen_regular(100, 3, 7).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut x0: Vec<f64> = (0..100).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mal = [10, 60];
        x0[10] = 1e3;
        x0[60] = -1e3;
        let (lo, hi) = (0..100)
            .filter(|i| !mal.contains(i))
            .map(|i| x0[i])
            .fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(v), b.max(v)));
        let tr = simulate_wmsr(&w, &x0, &mal, 2, 2000).unwrap();
        for x in tr.states() {
            for i in (0..100).filter(|i| !mal.contains(i)) {
                assert!(x[i] >= lo && x[i] <= hi);
            }
        }
        assert_eq!(tr.terminal()[10], 1e3);
    }
}
