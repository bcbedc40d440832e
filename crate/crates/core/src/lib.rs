//! Competition-based resilient consensus.
//!
//! Regular agents run Friedkin-Johnsen (FJ) dynamics, anchoring to their own
//! prior with weight `lambda` while malicious agents hold a constant
//! (noise-corrupted) state. The crate provides:
//!
//! * [`graphkit`]: regular-graph sampling, doubly-stochastic weights,
//!   matchings and the malicious-row transform.
//! * [`dynamics`]: trajectory simulation (consensus, FJ, W-MSR), the
//!   steady-state operator and a Monte Carlo error estimator.
//! * [`analysis`]: the closed-form consensus error, its derivatives and
//!   endpoint limits, the collaboration/competition split and `lambda`
//!   optimization.
//! * [`control`]: the finite-horizon controllability Gramian of the
//!   malicious input channel.
//! * [`netopt`]: worst-case adversary placement and greedy topology
//!   hardening.
//!
//! Nodes are 0-based in the API. File formats use 1-based labels.

pub mod analysis;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod graphkit;
pub mod io;
pub mod netopt;
pub mod validate;

pub use error::{Error, Result};
