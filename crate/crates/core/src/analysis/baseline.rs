use crate::error::{invalid, Result};

/// Closed-form reference errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineKind {
    /// Average consensus with `m` noisy outliers among `n`: `d M / N`.
    ConsensusOutliers,
    /// Consensus with `m` malicious nodes: `R/M + R d/M + 1`.
    ConsensusMalicious,
    /// FJ with `lambda = 1`: `R - 1`.
    FjFullCompetition,
}

pub fn baseline_error(kind: BaselineKind, n: usize, r: usize, m: usize, d: f64) -> Result<f64> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(invalid(format!("noise variance must be >= 0, got {d}")));
    }
    match kind {
        BaselineKind::ConsensusOutliers => {
            if n == 0 || m > n {
                return Err(invalid(format!(
                    "need 0 <= m <= n and n >= 1, got n={n}, m={m}"
                )));
            }
            Ok(d * m as f64 / n as f64)
        }
        BaselineKind::ConsensusMalicious => {
            if r == 0 || m == 0 || r + m != n {
                return Err(invalid(format!(
                    "need r, m >= 1 and r + m = n, got n={n}, r={r}, m={m}"
                )));
            }
            let (r, m) = (r as f64, m as f64);
            Ok(r / m + r * d / m + 1.0)
        }
        BaselineKind::FjFullCompetition => {
            if r == 0 || r + m != n {
                return Err(invalid(format!(
                    "need r >= 1 and r + m = n, got n={n}, r={r}, m={m}"
                )));
            }
            Ok(r as f64 - 1.0)
        }
    }
}

/// `M (1 - 2/R) - 1`: above this noise level, consensus does worse than
/// `lambda = 1`.
pub fn dominance_threshold(r: usize, m: usize) -> f64 {
    m as f64 * (1.0 - 2.0 / r as f64) - 1.0
}
