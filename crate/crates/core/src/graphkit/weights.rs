use nalgebra::DMatrix;

use super::Topology;
use crate::error::{invalid, Error, Result};

pub const SINKHORN_MAX_ITER: usize = 10_000;
const SINKHORN_TOL: f64 = 1e-13;
const STOCHASTIC_TOL: f64 = 1e-10;

/// Symmetric doubly-stochastic weights with zero diagonal, supported on the
/// edges of a connected topology.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    topology: Topology,
    entries: DMatrix<f64>,
}

impl WeightMatrix {
    /// Validates a dense matrix; the topology is read off the support.
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(invalid("weight matrix must be square"));
        }
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let w = entries[(i, j)];
                if !w.is_finite() || w < 0.0 {
                    return Err(invalid(format!("entry ({}, {}) = {w}", i + 1, j + 1)));
                }
                if (w - entries[(j, i)]).abs() > 1e-12 {
                    return Err(invalid("weight matrix is not symmetric"));
                }
                if i == j && w != 0.0 {
                    return Err(invalid(format!("nonzero diagonal at node {}", i + 1)));
                }
                if i < j && w > 0.0 {
                    pairs.push((i, j));
                }
            }
        }
        let topology = Topology::new(n, pairs)?;
        if !topology.is_connected() {
            return Err(Error::Disconnected);
        }
        let w = WeightMatrix { topology, entries };
        let defect = w.stochasticity_defect();
        if defect > STOCHASTIC_TOL {
            return Err(invalid(format!(
                "row/column sums deviate from 1 by {defect:.3e}"
            )));
        }
        Ok(w)
    }

    pub fn n(&self) -> usize {
        self.topology.n()
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Largest deviation of a row or column sum from 1.
    pub fn stochasticity_defect(&self) -> f64 {
        let rows = self.entries.row_iter().map(|r| (r.sum() - 1.0).abs());
        let cols = self.entries.column_iter().map(|c| (c.sum() - 1.0).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }

    pub fn symmetry_defect(&self) -> f64 {
        (&self.entries - self.entries.transpose()).amax()
    }
}

/// `1/delta` on every edge of a connected `delta`-regular graph.
pub fn uniform_weights(t: &Topology) -> Result<WeightMatrix> {
    let delta = t.regular_degree().ok_or(Error::NotRegular)?;
    if !t.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = t.n();
    let mut entries = DMatrix::zeros(n, n);
    let w = 1.0 / delta as f64;
    for e in t.edges() {
        entries[(e.u(), e.v())] = w;
        entries[(e.v(), e.u())] = w;
    }
    Ok(WeightMatrix {
        topology: t.clone(),
        entries,
    })
}

/// Symmetric Sinkhorn-Knopp scaling `D A D` of the adjacency pattern.
///
/// Iterates `x <- sqrt(x / (A x))` until `x_i (A x)_i = 1` for every node.
/// Patterns without total support (e.g. stars) never balance and are
/// reported as infeasible after [`SINKHORN_MAX_ITER`] sweeps.
pub fn reweigh(t: &Topology) -> Result<WeightMatrix> {
    if !t.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = t.n();
    let mut x = vec![1.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..SINKHORN_MAX_ITER {
        let ax: Vec<f64> = (0..n)
            .map(|i| t.neighbors(i).iter().map(|&j| x[j]).sum())
            .collect();
        residual =
            x.iter()
                .zip(&ax)
                .map(|(xi, a)| (xi * a - 1.0).abs())
                .fold(
                    0.0,
                    |acc: f64, r| if r.is_nan() { f64::NAN } else { acc.max(r) },
                );
        if !residual.is_finite() || x.iter().any(|xi| !xi.is_finite() || *xi == 0.0) {
            break;
        }
        if residual < SINKHORN_TOL {
            let mut entries = DMatrix::zeros(n, n);
            for e in t.edges() {
                let w = x[e.u()] * x[e.v()];
                entries[(e.u(), e.v())] = w;
                entries[(e.v(), e.u())] = w;
            }
            let w = WeightMatrix {
                topology: t.clone(),
                entries,
            };
            if w.stochasticity_defect() > STOCHASTIC_TOL {
                break;
            }
            return Ok(w);
        }
        for (xi, a) in x.iter_mut().zip(&ax) {
            *xi = (*xi / a).sqrt();
        }
    }
    Err(Error::InfeasiblePattern {
        iterations: SINKHORN_MAX_ITER,
        residual,
    })
}
