use std::io::Write;

use rayon::prelude::*;

use super::{pick, worst_case_node, MetricKind};
use crate::error::{Error, Result};
use crate::graphkit::{max_matching, reweigh, uniform_weights, Edge, Topology, WeightMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkipReason {
    Disconnects,
    /// Sinkhorn scaling failed on the remaining pattern.
    Infeasible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SkippedCandidate {
    pub step: usize,
    pub edge: Edge,
    pub reason: SkipReason,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemovalStep {
    pub edge: Edge,
    pub worst_node: usize,
    pub metric_value: f64,
    pub n_edges: usize,
}

/// Audit trail of a greedy run.
#[derive(Clone, Debug)]
pub struct RemovalTrace {
    pub metric: MetricKind,
    pub initial: WeightMatrix,
    /// Worst-case node and metric of the input graph.
    pub initial_worst: (usize, f64),
    pub steps: Vec<RemovalStep>,
    pub skipped: Vec<SkippedCandidate>,
    pub final_weights: WeightMatrix,
    pub removal_counts: Vec<usize>,
}

impl RemovalTrace {
    pub fn removed_edges(&self) -> Vec<Edge> {
        self.steps.iter().map(|s| s.edge).collect()
    }

    /// Columns `step,edge_u,edge_v,worst_node,metric_value,n_edges`, 1-based
    /// labels. Step 0 is the input graph and leaves the edge columns empty.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "step,edge_u,edge_v,worst_node,metric_value,n_edges")?;
        let (node, value) = self.initial_worst;
        writeln!(
            out,
            "0,,,{},{},{}",
            node + 1,
            value,
            self.initial.topology().edge_count()
        )?;
        for (k, s) in self.steps.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                k + 1,
                s.edge.u() + 1,
                s.edge.v() + 1,
                s.worst_node + 1,
                s.metric_value,
                s.n_edges
            )?;
        }
        Ok(())
    }
}

enum Outcome {
    Kept(usize, f64),
    Skipped(SkipReason),
}

fn try_candidate(t: &Topology, e: Edge, metric: MetricKind) -> Result<Outcome> {
    let pruned = t.remove_edges(&[e])?;
    if !pruned.is_connected() {
        return Ok(Outcome::Skipped(SkipReason::Disconnects));
    }
    let w = match reweigh(&pruned) {
        Ok(w) => w,
        Err(Error::InfeasiblePattern { .. }) => {
            return Ok(Outcome::Skipped(SkipReason::Infeasible))
        }
        Err(e) => return Err(e),
    };
    let (node, value) = worst_case_node(&w, metric)?;
    Ok(Outcome::Kept(node, value))
}

/// Removes `e_rm` edges one at a time, each time the edge whose removal
/// leaves the smallest worst-case metric. A node loses at most one edge;
/// removals that disconnect the graph or leave a pattern without a
/// doubly-stochastic scaling are skipped.
pub fn greedy_edge_removal(
    w: &WeightMatrix,
    e_rm: usize,
    metric: MetricKind,
) -> Result<RemovalTrace> {
    if w.topology().regular_degree().is_none() {
        return Err(Error::NotRegular);
    }
    let initial_worst = worst_case_node(w, metric)?;
    let n = w.n();
    let mut counts = vec![0usize; n];
    let mut current = w.clone();
    let mut steps = Vec::new();
    let mut skipped = Vec::new();
    for step in 1..=e_rm {
        let t = current.topology().clone();
        let candidates: Vec<Edge> = t
            .edges()
            .filter(|e| counts[e.u()] == 0 && counts[e.v()] == 0)
            .collect();
        let outcomes: Vec<Outcome> = candidates
            .par_iter()
            .map(|&e| try_candidate(&t, e, metric))
            .collect::<Result<_>>()?;
        let mut values = Vec::with_capacity(candidates.len());
        for (&edge, outcome) in candidates.iter().zip(&outcomes) {
            match *outcome {
                Outcome::Kept(_, v) => values.push(v),
                Outcome::Skipped(reason) => {
                    skipped.push(SkippedCandidate { step, edge, reason });
                    values.push(f64::INFINITY);
                }
            }
        }
        let Some(best) = pick(&values, false) else {
            return Err(Error::ConstraintExhausted {
                removed: step - 1,
                requested: e_rm,
            });
        };
        let edge = candidates[best];
        let Outcome::Kept(worst_node, metric_value) = outcomes[best] else {
            unreachable!("picked a skipped candidate")
        };
        current = reweigh(&t.remove_edges(&[edge])?)?;
        counts[edge.u()] += 1;
        counts[edge.v()] += 1;
        steps.push(RemovalStep {
            edge,
            worst_node,
            metric_value,
            n_edges: current.topology().edge_count(),
        });
    }
    Ok(RemovalTrace {
        metric,
        initial: w.clone(),
        initial_worst,
        steps,
        skipped,
        final_weights: current,
        removal_counts: counts,
    })
}

/// Drops a perfect matching from a regular graph, leaving a
/// `(delta - 1)`-regular graph with uniform weights.
pub fn matching_prune(w: &WeightMatrix) -> Result<WeightMatrix> {
    let t = w.topology();
    if t.regular_degree().is_none() {
        return Err(Error::NotRegular);
    }
    let matching = max_matching(t);
    if !matching.is_perfect() {
        return Err(Error::NoPerfectMatching {
            size: matching.len(),
            n: t.n(),
        });
    }
    let pruned = t.remove_edges(matching.edges())?;
    if !pruned.is_connected() {
        return Err(Error::Disconnected);
    }
    uniform_weights(&pruned)
}
