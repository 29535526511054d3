//! Command-line driver: scenario files in, CSV trajectories and JSON reports out.
//!
//! Exit status is 0 on success, 2 for input errors (unreadable or invalid
//! scenario, bad flags), 3 for computation errors and 1 when output cannot be
//! written. Per-body failures still leave the other bodies' files in place.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod output;
pub mod scenario;

pub use commands::{run, Command, Outcome, Status, Sweep};
pub use scenario::{Scenario, ScenarioError};
