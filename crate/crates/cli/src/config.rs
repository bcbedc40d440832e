use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use rescomp::analysis::{lambda_grid, DEFAULT_GRID_SIZE, LAMBDA_LO};
use rescomp::graphkit::{
    gen_degree_sequence, gen_regular, reweigh, uniform_weights, Topology, WeightMatrix,
};
use rescomp::io::{read_edge_list, read_weights_csv};

use crate::failure::{config_err, Outcome};

/// One JSON document per run. Node labels are 1-based.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: Option<GraphSpec>,
    /// Node count for `degree-sweep`.
    pub n: Option<usize>,
    pub malicious: Option<MaliciousSpec>,
    /// Adversary count when `malicious` is `"worst"`.
    pub m_count: Option<usize>,
    pub d: Option<f64>,
    pub d_grid: Option<Vec<f64>>,
    pub variances: Option<Vec<f64>>,
    pub lambda: Option<LambdaSpec>,
    pub grid_size: Option<usize>,
    pub k_horizon: Option<usize>,
    /// Simulation length for `compare`.
    pub steps: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub m_values: Option<Vec<usize>>,
    pub fixed: Option<FixedCount>,
    pub degrees: Option<Vec<usize>>,
    pub e_rm: Option<usize>,
    pub metric: Option<MetricChoice>,
    /// W-MSR trim count; defaults to the number of adversaries.
    pub f: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum GraphSpec {
    Regular(RegularSpec),
    EdgeList(EdgeListSpec),
    Weights(WeightsSpec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularSpec {
    pub n: usize,
    pub degree: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeListSpec {
    pub edge_list: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSpec {
    pub weights: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum MaliciousSpec {
    Nodes(Vec<usize>),
    Keyword(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Fixed(f64),
    Grid { grid: GridSpec },
    Keyword(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub size: usize,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum FixedCount {
    N,
    R,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MetricChoice {
    ConsensusError,
    ControllabilityIndex,
    Both,
}

/// How the adversaries are chosen once the graph is known.
pub enum Adversaries {
    Nodes(Vec<usize>),
    Worst(usize),
}

pub enum LambdaChoice {
    Fixed(f64),
    Grid(Vec<f64>),
    Optimize,
}

impl ExperimentConfig {
    /// Parses `text`; relative file paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Outcome<Self> {
        if text.trim().is_empty() {
            return Err(config_err("empty config"));
        }
        let mut cfg: ExperimentConfig = serde_json::from_str(text)?;
        match &mut cfg.graph {
            Some(GraphSpec::EdgeList(s)) => s.edge_list = resolve(base, &s.edge_list)?,
            Some(GraphSpec::Weights(s)) => s.weights = resolve(base, &s.weights)?,
            _ => {}
        }
        Ok(cfg)
    }

    pub fn graph(&self, run_seed: u64) -> Outcome<WeightMatrix> {
        match self
            .graph
            .as_ref()
            .ok_or_else(|| config_err("missing `graph`"))?
        {
            GraphSpec::Regular(s) => Ok(uniform_weights(&gen_regular(
                s.n,
                s.degree,
                s.seed.unwrap_or(run_seed),
            )?)?),
            GraphSpec::EdgeList(s) => {
                weigh(&read_edge_list(BufReader::new(File::open(&s.edge_list)?))?)
            }
            GraphSpec::Weights(s) => Ok(read_weights_csv(BufReader::new(File::open(&s.weights)?))?),
        }
    }

    pub fn regular_spec(&self) -> Outcome<&RegularSpec> {
        match &self.graph {
            Some(GraphSpec::Regular(s)) => Ok(s),
            _ => Err(config_err(
                "`graph` must be {\"n\", \"degree\"} for this command",
            )),
        }
    }

    pub fn adversaries(&self, n: usize) -> Outcome<Adversaries> {
        match self
            .malicious
            .as_ref()
            .ok_or_else(|| config_err("missing `malicious`"))?
        {
            MaliciousSpec::Nodes(labels) => {
                if labels.is_empty() {
                    return Err(config_err("`malicious` is empty"));
                }
                let nodes = labels
                    .iter()
                    .map(|&x| {
                        if x == 0 || x > n {
                            Err(config_err(format!("malicious label {x} outside 1..{n}")))
                        } else {
                            Ok(x - 1)
                        }
                    })
                    .collect::<Outcome<Vec<_>>>()?;
                Ok(Adversaries::Nodes(nodes))
            }
            MaliciousSpec::Keyword(k) if k == "worst" => {
                Ok(Adversaries::Worst(self.m_count.unwrap_or(1)))
            }
            MaliciousSpec::Keyword(k) => {
                Err(config_err(format!("unknown malicious keyword `{k}`")))
            }
        }
    }

    pub fn lambda(&self) -> Outcome<Option<LambdaChoice>> {
        Ok(match &self.lambda {
            None => None,
            Some(LambdaSpec::Fixed(l)) => {
                if !(*l > 0.0 && *l <= 1.0) {
                    return Err(config_err(format!("lambda must lie in (0, 1], got {l}")));
                }
                Some(LambdaChoice::Fixed(*l))
            }
            Some(LambdaSpec::Grid { grid }) => {
                if !(grid.lo > 0.0 && grid.lo < grid.hi && grid.hi <= 1.0 && grid.size >= 2) {
                    return Err(config_err(
                        "lambda grid needs 0 < lo < hi <= 1 and size >= 2",
                    ));
                }
                Some(LambdaChoice::Grid(lambda_grid(grid.lo, grid.hi, grid.size)))
            }
            Some(LambdaSpec::Keyword(k)) if k == "optimize" => Some(LambdaChoice::Optimize),
            Some(LambdaSpec::Keyword(k)) => {
                return Err(config_err(format!("unknown lambda keyword `{k}`")))
            }
        })
    }

    pub fn fixed_lambda(&self) -> Outcome<f64> {
        match self.lambda()? {
            Some(LambdaChoice::Fixed(l)) => Ok(l),
            _ => Err(config_err("this command needs a numeric `lambda`")),
        }
    }

    /// Explicit grid, or the default evaluation grid.
    pub fn lambda_grid(&self) -> Outcome<Vec<f64>> {
        match self.lambda()? {
            Some(LambdaChoice::Grid(g)) => Ok(g),
            Some(LambdaChoice::Fixed(_)) => Err(config_err("this command needs a lambda grid")),
            _ => Ok(lambda_grid(LAMBDA_LO, 1.0, self.grid_size())),
        }
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size.unwrap_or(DEFAULT_GRID_SIZE)
    }

    pub fn d(&self) -> Outcome<f64> {
        let d = self.d.unwrap_or(0.0);
        check_d(d)?;
        Ok(d)
    }

    pub fn d_values(&self) -> Outcome<Vec<f64>> {
        let values = match (&self.d_grid, self.d) {
            (Some(_), Some(_)) => return Err(config_err("give either `d` or `d_grid`, not both")),
            (Some(g), None) if g.is_empty() => return Err(config_err("`d_grid` is empty")),
            (Some(g), None) => g.clone(),
            (None, d) => vec![d.unwrap_or(0.0)],
        };
        for &d in &values {
            check_d(d)?;
        }
        Ok(values)
    }

    pub fn required<T: Clone>(&self, value: &Option<T>, name: &str) -> Outcome<T> {
        value
            .clone()
            .ok_or_else(|| config_err(format!("missing `{name}`")))
    }
}

fn check_d(d: f64) -> Outcome<()> {
    if d >= 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("noise variance must be >= 0, got {d}")))
    }
}

fn resolve(base: &Path, p: &Path) -> Outcome<PathBuf> {
    let full = if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    };
    if !full.is_file() {
        return Err(config_err(format!("file not found: {}", full.display())));
    }
    Ok(full)
}

/// Uniform weights on regular graphs, Sinkhorn scaling otherwise.
pub fn weigh(t: &Topology) -> Outcome<WeightMatrix> {
    Ok(match t.regular_degree() {
        Some(_) => uniform_weights(t)?,
        None => reweigh(t)?,
    })
}

/// `degree`-regular graph on `n` nodes, or one node of degree `degree + 1`
/// when `n * degree` is odd.
pub fn near_regular(n: usize, degree: usize, seed: u64) -> Outcome<WeightMatrix> {
    if n * degree % 2 == 0 {
        return Ok(uniform_weights(&gen_regular(n, degree, seed)?)?);
    }
    let mut degrees = vec![degree; n];
    degrees[0] += 1;
    weigh(&gen_degree_sequence(&degrees, seed)?)
}
