//! Configuration-driven experiment runner for weighted zero sums.
//!
//! The `blaschke-lab` binary is a thin wrapper over [`runners`]; the same
//! entry points are used by the integration tests.

pub mod config;
pub mod error;
pub mod family;
pub mod output;
pub mod runners;
pub mod suites;
