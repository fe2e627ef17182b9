// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qmap::oracle::DEFAULT_SEED;
use qmap::BlochState;

use crate::config::{resolve_seed, AnalysisConfig, Format, ScenarioSource};
use crate::error::{CliError, Outcome};
use crate::{analyze, evolve, sweep, trajectories};

#[derive(Debug, Parser)]
#[command(name = "qmap", version, about = "Positivity and long-time behavior of two-level dynamical maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a scenario and write the full JSON (or per-point CSV) report.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Verdicts and minimum margins over a range of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to vary.
        #[arg(long)]
        vary: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        /// Number of values, both ends included.
        #[arg(long, default_value_t = 21)]
        steps: usize,
    },
    /// z(t) curves from several initial populations (default preset parametric_alpha).
    Trajectories {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<f64>,
        /// Comma-separated initial z values; defaults to -1, -0.75, ..., 1.
        #[arg(long = "z0", value_delimiter = ',', allow_hyphen_values = true)]
        z0: Vec<f64>,
    },
    /// Propagate one initial Bloch vector over the grid.
    Evolve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Rate limits and predicted equilibrium at the horizon.
    Asymptote {
        #[command(flatten)]
        common: Common,
        /// Also propagate this state to the horizon and compare.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Built-in scenario name.
    #[arg(long, conflicts_with = "scenario")]
    pub preset: Option<String>,
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Parameter override, repeatable.
    #[arg(long = "param", value_name = "K=V", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    /// Asymptotic horizon; defaults to max(50, t_max).
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub no_oracle: bool,
    /// Oracle sampling seed; QMAP_SEED takes precedence.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub y0: f64,
    #[arg(long = "z0", default_value_t = 1.0, allow_negative_numbers = true)]
    pub z0: f64,
}

impl StateArgs {
    fn state(&self) -> BlochState<f64> {
        BlochState::new(self.x0, self.y0, self.z0)
    }
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected K=V, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

impl Common {
    /// Config for a command; `default_preset` is used when neither
    /// `--preset` nor `--scenario` is given.
    pub fn config(&self, default_format: Format, default_preset: Option<&str>) -> Result<AnalysisConfig, CliError> {
        let source = match (&self.preset, &self.scenario, default_preset) {
            (Some(p), _, _) => ScenarioSource::Preset(p.clone()),
            (None, Some(path), _) => ScenarioSource::File(path.clone()),
            (None, None, Some(p)) => ScenarioSource::Preset(p.to_string()),
            (None, None, None) => return Err(CliError::Config("one of --preset or --scenario is required".into())),
        };
        let params: BTreeMap<String, f64> = self.params.iter().cloned().collect();
        Ok(AnalysisConfig {
            source,
            params,
            t_max: self.t_max,
            grid: self.grid,
            oracle: !self.no_oracle,
            horizon: self.horizon.unwrap_or(self.t_max.max(50.0)),
            out: self.out.clone(),
            format: self.format.unwrap_or(default_format),
            seed: resolve_seed(self.seed)?,
        })
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Analyze { common } => analyze::run_analyze(&common.config(Format::Json, None)?),
        Command::Sweep { common, vary, from, to, steps } => {
            sweep::run_sweep(&common.config(Format::Csv, None)?, &vary, from, to, steps)
        }
        Command::Trajectories { common, alpha, z0 } => {
            let config = common.config(Format::Csv, Some("parametric_alpha"))?;
            let zs = if z0.is_empty() { trajectories::default_initial_zs() } else { z0 };
            trajectories::run_trajectories(&config, alpha, &zs).map(|_| Outcome::Ok)
        }
        Command::Evolve { common, state } => {
            evolve::run_evolve(&common.config(Format::Csv, None)?, &state.state()).map(|_| Outcome::Ok)
        }
        Command::Asymptote { common, verify, state, tol } => {
            let s = state.state();
            evolve::run_asymptote(&common.config(Format::Json, None)?, verify.then_some(&s), tol).map(|_| Outcome::Ok)
        }
    }
}
