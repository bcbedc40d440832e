use thiserror::Error;

use crate::graphkit::Edge;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no {degree}-regular graph on {n} nodes: n*degree is odd")]
    Parity { n: usize, degree: usize },

    #[error("no connected simple graph found after {attempts} resamples")]
    GenerationFailed { attempts: usize },

    #[error("graph is not regular; use reweigh for non-regular topologies")]
    NotRegular,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("edge {0} is not in the topology")]
    UnknownEdge(Edge),

    #[error("pattern admits no zero-diagonal doubly-stochastic scaling (residual {residual:.3e} after {iterations} iterations)")]
    InfeasiblePattern { iterations: usize, residual: f64 },

    #[error("graph has no perfect matching (maximum matching has {size} edges on {n} nodes)")]
    NoPerfectMatching { size: usize, n: usize },

    #[error("malicious set must be a nonempty strict subset of the nodes")]
    InvalidMaliciousSet,

    #[error("node {0} is not malicious in this configuration")]
    NotMalicious(usize),

    #[error("error decomposition needs exactly one malicious node, got {0}")]
    UnsupportedDecomposition(usize),

    #[error("I - W11 is ill-conditioned (condition number {0:.3e})")]
    IllConditioned(f64),

    #[error("singular linear system")]
    Singular,

    #[error("greedy removal exhausted its candidates after {removed} of {requested} removals")]
    ConstraintExhausted { removed: usize, requested: usize },

    #[error("{subsets} malicious subsets exceed the budget of {limit}; use m_count = 1 or a smaller graph")]
    SubsetBudget { subsets: u128, limit: u128 },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Infeasible inputs: the requested object does not exist for this graph.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::InfeasiblePattern { .. }
                | Error::NoPerfectMatching { .. }
                | Error::Disconnected
                | Error::GenerationFailed { .. }
                | Error::ConstraintExhausted { .. }
        )
    }

    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::IllConditioned(_) | Error::Singular)
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
