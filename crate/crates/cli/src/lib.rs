// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end for `qmap`: analysis reports, parameter sweeps and
//! trajectory export.
//!
//! Exit status is 0 on success, 1 on any I/O, configuration or evaluation
//! error (usage errors included), and 2 when a report breaks the chain
//! M ⇒ QM ⇒ CP ⇒ P. Reports are still written in the last case.

pub mod analyze;
pub mod args;
pub mod config;
pub mod error;
pub mod evolve;
pub mod output;
pub mod sweep;
pub mod trajectories;

pub use analyze::{analyze, run_analyze, AnalysisReport};
pub use args::{run, Cli};
pub use config::{AnalysisConfig, Format, ScenarioSource};
pub use error::{CliError, Outcome};
pub use sweep::{run_sweep, sweep, SweepRow};
pub use trajectories::{run_trajectories, trajectories, Trajectories};
