use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Edge, Topology};
use crate::error::{invalid, Error, Result};

/// Number of full pairings tried before giving up.
pub const DEFAULT_RESAMPLE_BUDGET: usize = 1000;

/// Connected simple `delta`-regular graph on `n` nodes.
///
/// Configuration-model pairing: stubs are matched at random and a pair that
/// would create a loop or a multi-edge is rejected and redrawn. A pairing
/// that gets stuck, or a disconnected result, counts as one resample.
pub fn gen_regular(n: usize, delta: usize, seed: u64) -> Result<Topology> {
    if n < 3 {
        return Err(invalid(format!("need n >= 3, got {n}")));
    }
    if delta == 0 || delta >= n {
        return Err(invalid(format!("degree must lie in 1..{n}, got {delta}")));
    }
    if n * delta % 2 == 1 {
        return Err(Error::Parity { n, degree: delta });
    }
    gen_degree_sequence(&vec![delta; n], seed)
}

/// Connected simple graph with the given degree sequence.
pub fn gen_degree_sequence(degrees: &[usize], seed: u64) -> Result<Topology> {
    let n = degrees.len();
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(invalid("degree sequence has an odd sum"));
    }
    if degrees.iter().any(|&d| d == 0 || d >= n) {
        return Err(invalid("every degree must lie in 1..n"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..DEFAULT_RESAMPLE_BUDGET {
        let Some(edges) = pair_stubs(degrees, &mut rng) else {
            continue;
        };
        let t = Topology::from_edge_set(n, edges);
        if t.is_connected() {
            return Ok(t);
        }
    }
    Err(Error::GenerationFailed {
        attempts: DEFAULT_RESAMPLE_BUDGET,
    })
}

fn pair_stubs(degrees: &[usize], rng: &mut ChaCha8Rng) -> Option<BTreeSet<Edge>> {
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(i, &d)| std::iter::repeat_n(i, d))
        .collect();
    let mut edges = BTreeSet::new();
    let suitable =
        |edges: &BTreeSet<Edge>, a: usize, b: usize| a != b && !edges.contains(&Edge::new(a, b));

    while !stubs.is_empty() {
        let len = stubs.len();
        let mut picked = None;
        for _ in 0..10 * len {
            let i = rng.random_range(0..len);
            let j = rng.random_range(0..len);
            if i != j && suitable(&edges, stubs[i], stubs[j]) {
                picked = Some((i, j));
                break;
            }
        }
        if picked.is_none() {
            // near the end of the pairing: enumerate what is left
            let options: Vec<(usize, usize)> = (0..len)
                .flat_map(|i| (i + 1..len).map(move |j| (i, j)))
                .filter(|&(i, j)| suitable(&edges, stubs[i], stubs[j]))
                .collect();
            if options.is_empty() {
                return None;
            }
            picked = Some(options[rng.random_range(0..options.len())]);
        }
        let (i, j) = picked.unwrap();
        edges.insert(Edge::new(stubs[i], stubs[j]));
        let (hi, lo) = (i.max(j), i.min(j));
        stubs.swap_remove(hi);
        stubs.swap_remove(lo);
    }
    Some(edges)
}
