use serde::{Deserialize, Serialize};

use crate::analysis::PriorCovariance;
use crate::error::{invalid, Result};

/// Who attacks, how noisy their priors are, and how priors are spread.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    malicious: Vec<usize>,
    d: f64,
    variances: Vec<f64>,
    seed: u64,
}

// On-disk form: 1-based malicious labels.
#[derive(Serialize, Deserialize)]
struct ScenarioRecord {
    malicious: Vec<usize>,
    d: f64,
    variances: Vec<f64>,
    seed: u64,
}

impl Scenario {
    /// Unit prior variances on `n` nodes.
    pub fn new(n: usize, malicious: &[usize], d: f64, seed: u64) -> Result<Self> {
        Self::with_variances(vec![1.0; n], malicious, d, seed)
    }

    pub fn with_variances(
        variances: Vec<f64>,
        malicious: &[usize],
        d: f64,
        seed: u64,
    ) -> Result<Self> {
        let n = variances.len();
        if !(d >= 0.0 && d.is_finite()) {
            return Err(invalid(format!("noise variance must be >= 0, got {d}")));
        }
        if variances.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(invalid("prior variances must be positive"));
        }
        let mut sorted = malicious.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != malicious.len() || sorted.iter().any(|&m| m >= n) {
            return Err(invalid("malicious set has duplicates or unknown nodes"));
        }
        if sorted.len() == n {
            return Err(invalid("scenario has no regular nodes"));
        }
        Ok(Scenario {
            malicious: sorted,
            d,
            variances,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.variances.len()
    }

    pub fn malicious(&self) -> &[usize] {
        &self.malicious
    }

    pub fn regular(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|i| self.malicious.binary_search(i).is_err())
            .collect()
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `Sigma = diag(variances) + d V`.
    pub fn covariance(&self) -> PriorCovariance {
        PriorCovariance::new(self.d, self.variances.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        let record = ScenarioRecord {
            malicious: self.malicious.iter().map(|m| m + 1).collect(),
            d: self.d,
            variances: self.variances.clone(),
            seed: self.seed,
        };
        Ok(serde_json::to_string_pretty(&record)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: ScenarioRecord = serde_json::from_str(text)?;
        if record.malicious.contains(&0) {
            return Err(invalid("malicious labels are 1-based"));
        }
        let malicious: Vec<usize> = record.malicious.iter().map(|m| m - 1).collect();
        Self::with_variances(record.variances, &malicious, record.d, record.seed)
    }
}
