use nalgebra::DMatrix;

use super::WeightMatrix;
use crate::error::{Error, Result};

/// Weight matrix with malicious rows replaced by standard basis rows.
///
/// Internally nodes are permuted so that regular nodes come first (in
/// ascending label order) followed by malicious nodes; this is the block
/// layout `[[W11, W12], [0, I_M]]` used by every analysis routine.
#[derive(Clone, Debug)]
pub struct OperatedWeights {
    base: WeightMatrix,
    malicious: Vec<usize>,
    /// block position -> node label
    order: Vec<usize>,
    /// node label -> block position
    position: Vec<usize>,
    permuted: DMatrix<f64>,
}

pub fn apply_malicious(w: &WeightMatrix, malicious: &[usize]) -> Result<OperatedWeights> {
    OperatedWeights::new(w, malicious)
}

impl OperatedWeights {
    pub fn new(w: &WeightMatrix, malicious: &[usize]) -> Result<Self> {
        let n = w.n();
        let mut is_malicious = vec![false; n];
        for &m in malicious {
            if m >= n || is_malicious[m] {
                return Err(Error::InvalidMaliciousSet);
            }
            is_malicious[m] = true;
        }
        if malicious.is_empty() || malicious.len() == n {
            return Err(Error::InvalidMaliciousSet);
        }
        Ok(Self::build(w, malicious, &is_malicious))
    }

    /// The attack-free case `M = {}`: `W' = W`. Only simulation and Monte
    /// Carlo accept it; the block analysis assumes at least one adversary.
    pub fn nominal(w: &WeightMatrix) -> Self {
        Self::build(w, &[], &vec![false; w.n()])
    }

    fn build(w: &WeightMatrix, malicious: &[usize], is_malicious: &[bool]) -> Self {
        let n = w.n();
        let mut sorted = malicious.to_vec();
        sorted.sort_unstable();
        let order: Vec<usize> = (0..n)
            .filter(|&i| !is_malicious[i])
            .chain(sorted.iter().copied())
            .collect();
        let mut position = vec![0; n];
        for (p, &node) in order.iter().enumerate() {
            position[node] = p;
        }
        let r = n - sorted.len();
        let permuted = DMatrix::from_fn(n, n, |p, q| {
            if p < r {
                w.get(order[p], order[q])
            } else if p == q {
                1.0
            } else {
                0.0
            }
        });
        OperatedWeights {
            base: w.clone(),
            malicious: sorted,
            order,
            position,
            permuted,
        }
    }

    pub fn base(&self) -> &WeightMatrix {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Number of regular nodes, `R`.
    pub fn r(&self) -> usize {
        self.n() - self.malicious.len()
    }

    /// Number of malicious nodes, `M`.
    pub fn m(&self) -> usize {
        self.malicious.len()
    }

    /// Malicious labels, ascending.
    pub fn malicious(&self) -> &[usize] {
        &self.malicious
    }

    /// Regular labels, ascending.
    pub fn regular(&self) -> &[usize] {
        &self.order[..self.r()]
    }

    pub fn is_malicious(&self, node: usize) -> bool {
        self.position[node] >= self.r()
    }

    /// Block position -> node label.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, node: usize) -> usize {
        self.position[node]
    }

    /// `W'` in block order.
    pub fn permuted(&self) -> &DMatrix<f64> {
        &self.permuted
    }

    /// `W'` in label order.
    pub fn entries(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| {
            self.permuted[(self.position[i], self.position[j])]
        })
    }

    /// Regular-regular block `W11` (`R x R`).
    pub fn w11(&self) -> DMatrix<f64> {
        let r = self.r();
        self.permuted.view((0, 0), (r, r)).into_owned()
    }

    /// Regular-malicious block `W12` (`R x M`).
    pub fn w12(&self) -> DMatrix<f64> {
        let r = self.r();
        self.permuted.view((0, r), (r, self.m())).into_owned()
    }

    /// Re-orders a label-indexed vector into block order.
    pub fn to_block_order<T: Copy>(&self, values: &[T]) -> Vec<T> {
        self.order.iter().map(|&i| values[i]).collect()
    }

    /// Inverse of [`Self::to_block_order`].
    pub fn to_label_order<T: Copy>(&self, values: &[T]) -> Vec<T> {
        self.position.iter().map(|&p| values[p]).collect()
    }
}
