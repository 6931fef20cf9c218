//! Agent-based simulation of multi-unit organizations whose unit managers
//! search correlated NKCS landscapes.
//!
//! The crate is organized bottom-up:
//!
//! - [`landscape`]: correlated NKCS fitness tables, performance measures and
//!   global maxima for normalization.
//! - [`organization`]: communication networks, memory with forgetting,
//!   conformity and synchrony.
//! - [`coordination`]: decentralized, pre-screening and centralized decision
//!   periods built on one-bit hill climbing.
//! - [`engine`]: scenario configuration, replications and CSV recording.
//! - [`stats`]: Mann-Whitney tests, Cliff's delta and confidence intervals.
//! - [`sensitivity`]: one-factor-at-a-time sweeps and Sobol indices.
//! - [`cli`]: the `run`, `sweep`, `stats`, `ofat` and `sobol` commands.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod coordination;
pub mod engine;
pub mod error;
pub mod landscape;
pub mod organization;
pub mod report;
pub mod rng;
pub mod sensitivity;
pub mod stats;

pub use coordination::{CoordinationMode, CoordinationSpec, GoalSpec, SearchMode};
pub use engine::{run_replication, run_scenario, Observable, RunRecord, ScenarioConfig, ScenarioResult, Summary};
pub use error::{Error, Result};
pub use landscape::{CouplingSpec, JointConfiguration, LandscapeSet};
pub use organization::{NetworkKind, NetworkTopology};
