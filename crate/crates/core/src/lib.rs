//! Collaborative treasure search on the infinite grid.
//!
//! `k` identical agents start at the origin of `Z²` and search for a
//! treasure placed at Manhattan distance `D`. The crate provides
//!
//! * [`grid`]: metric, canonical paths and the square spiral in closed form;
//! * [`protocols`]: advice oracles and the search protocols built on them;
//! * [`engine`]: phase-level and step-level executors, trials, ring coverage;
//! * [`harness`]: experiment configs, parallel sweeps, statistics, CSV output;
//! * [`verify`]: self-checks usable from the command line.

pub mod engine;
mod error;
pub mod grid;
pub mod harness;
pub mod protocols;
pub mod verify;

pub use engine::{lower_bound, run_trial, Cell, Mode, Placement, StreamKey, TrialRecord, WorldConfig};
pub use error::{Error, Result};
pub use grid::{manhattan, Point};
pub use protocols::{AdviceBits, AgentProgram, Algorithm, PhiSpec};
