// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::PathBuf;

use qmap::oracle::DEFAULT_SEED;
use qmap::Scenario;
use serde::Serialize;

use crate::error::CliError;

/// Largest accepted `t_max` and horizon.
pub const MAX_TIME: f64 = 1e4;
pub const MAX_GRID: usize = 10_000_000;
pub const MIN_HORIZON: f64 = 10.0;
pub const SEED_ENV: &str = "QMAP_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioSource {
    Preset(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub source: ScenarioSource,
    pub params: BTreeMap<String, f64>,
    pub t_max: f64,
    pub grid: usize,
    pub oracle: bool,
    pub horizon: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    #[serde(skip)]
    pub seed: u64,
}

impl AnalysisConfig {
    pub fn new(source: ScenarioSource) -> Self {
        AnalysisConfig {
            source,
            params: BTreeMap::new(),
            t_max: 20.0,
            grid: 2000,
            oracle: true,
            horizon: 50.0,
            out: None,
            format: Format::Json,
            seed: DEFAULT_SEED,
        }
    }

    pub fn preset(name: &str) -> Self {
        Self::new(ScenarioSource::Preset(name.to_string()))
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.t_max > 0.0 && self.t_max <= MAX_TIME) {
            return bad(format!("t_max must be in (0, {MAX_TIME}], got {}", self.t_max));
        }
        if !(2..=MAX_GRID).contains(&self.grid) {
            return bad(format!("grid must be in [2, {MAX_GRID}], got {}", self.grid));
        }
        if !(self.horizon >= self.t_max && self.horizon >= MIN_HORIZON && self.horizon <= MAX_TIME) {
            return bad(format!(
                "horizon must be at least max(t_max, {MIN_HORIZON}) and at most {MAX_TIME}, got {}",
                self.horizon
            ));
        }
        if let Some((k, v)) = self.params.iter().find(|(_, v)| !v.is_finite()) {
            return bad(format!("parameter {k} = {v} is not finite"));
        }
        Ok(())
    }

    /// Builds the scenario with parameter overrides applied.
    pub fn load_scenario(&self) -> Result<Scenario, CliError> {
        match &self.source {
            ScenarioSource::Preset(name) => Ok(Scenario::preset(name, &self.params)?),
            ScenarioSource::File(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                let mut sc = Scenario::from_json(&text)?;
                for (k, v) in &self.params {
                    sc = sc.with_param(k, *v)?;
                }
                Ok(sc)
            }
        }
    }
}

/// `--seed`, unless `QMAP_SEED` is set.
pub fn resolve_seed(flag: u64) -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Config(format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}
