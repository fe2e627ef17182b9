// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! `z(t)` curves from several initial populations, for plotting.

use qmap::{Accumulator, BlochState, GridSpec};
use serde::Serialize;

use crate::config::{AnalysisConfig, Format};
use crate::error::CliError;
use crate::output::{sig9, write_csv, write_json};

pub const ALPHA_PARAM: &str = "alpha";

/// `A ∈ {−1, −0.75, …, 1}`.
pub fn default_initial_zs() -> Vec<f64> {
    (0..=8).map(|k| -1.0 + 0.25 * k as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    #[serde(rename = "A")]
    pub z0: f64,
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectories {
    pub t: Vec<f64>,
    pub curves: Vec<Curve>,
}

impl Trajectories {
    /// Largest `z` on a curve and the grid time where it occurs.
    pub fn peak(&self, curve: usize) -> (f64, f64) {
        let z = &self.curves[curve].z;
        let k = (0..z.len()).fold(0, |best, k| if z[k] > z[best] { k } else { best });
        (z[k], self.t[k])
    }
}

/// Propagates `(0, 0, A)` for each `A` in `initial_zs` over the config grid.
/// With `alpha` set, the scenario's `alpha` parameter is replaced first.
pub fn trajectories(config: &AnalysisConfig, alpha: Option<f64>, initial_zs: &[f64]) -> Result<Trajectories, CliError> {
    config.validate()?;
    if let Some(a) = alpha {
        if !(0.0..=1.0).contains(&a) {
            return Err(CliError::Config(format!("alpha must lie in [0, 1], got {a}")));
        }
    }
    if let Some(z) = initial_zs.iter().find(|z| !(-1.0..=1.0).contains(*z)) {
        return Err(CliError::Config(format!("initial z must lie in [-1, 1], got {z}")));
    }
    let mut sc = config.load_scenario()?;
    if let Some(a) = alpha {
        sc = sc.with_param(ALPHA_PARAM, a)?;
    }
    let grid = GridSpec::new(config.t_max, config.grid)?;
    let mut acc = Accumulator::new(&sc);
    let mut t = Vec::with_capacity(config.grid);
    let mut curves: Vec<Curve> =
        initial_zs.iter().map(|&z0| Curve { z0, z: Vec::with_capacity(config.grid) }).collect();
    for time in grid.times() {
        let a = acc.at(time)?;
        t.push(time);
        for c in &mut curves {
            c.z.push(BlochState::new(0.0, 0.0, c.z0).propagate(&a).z);
        }
    }
    Ok(Trajectories { t, curves })
}

pub fn run_trajectories(config: &AnalysisConfig, alpha: Option<f64>, initial_zs: &[f64]) -> Result<(), CliError> {
    let tr = trajectories(config, alpha, initial_zs)?;
    let out = config.out.as_deref();
    match config.format {
        Format::Json => write_json(out, &tr),
        Format::Csv => {
            let mut header = vec!["t".to_string()];
            header.extend(tr.curves.iter().map(|c| format!("z_A={}", sig9(c.z0))));
            let rows: Vec<Vec<String>> = (0..tr.t.len())
                .map(|k| std::iter::once(tr.t[k]).chain(tr.curves.iter().map(|c| c.z[k])).map(sig9).collect())
                .collect();
            write_csv(out, &header, &rows)
        }
    }
}
