// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Single propagations: `evolve` and `asymptote`.

use qmap::asymptote::{
    estimate_limits, predict_equilibrium, verify_convergence, ConvergenceCheck, EquilibriumPrediction, RateLimits,
};
use qmap::ratefn::ScenarioDocOut;
use qmap::{Accumulator, BlochState, GridSpec};
use serde::Serialize;

use crate::config::{AnalysisConfig, Format};
use crate::error::CliError;
use crate::output::{sig9, write_csv, write_json};

fn check_state(b: &BlochState<f64>) -> Result<(), CliError> {
    if b.norm_sqr() > 1.0 + 1e-12 {
        return Err(CliError::Config(format!("initial state ({}, {}, {}) lies outside the Bloch ball", b.x, b.y, b.z)));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolvePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub norm_sqr: f64,
}

pub fn evolve(config: &AnalysisConfig, state0: &BlochState<f64>) -> Result<Vec<EvolvePoint>, CliError> {
    config.validate()?;
    check_state(state0)?;
    let sc = config.load_scenario()?;
    let grid = GridSpec::new(config.t_max, config.grid)?;
    let mut acc = Accumulator::new(&sc);
    grid.times()
        .map(|t| {
            let b = state0.propagate(&acc.at(t)?);
            Ok(EvolvePoint { t, x: b.x, y: b.y, z: b.z, norm_sqr: b.norm_sqr() })
        })
        .collect()
}

pub fn run_evolve(config: &AnalysisConfig, state0: &BlochState<f64>) -> Result<(), CliError> {
    let points = evolve(config, state0)?;
    let out = config.out.as_deref();
    match config.format {
        Format::Json => write_json(out, &points),
        Format::Csv => {
            let header = ["t", "x", "y", "z", "norm_sqr"].map(String::from);
            let rows: Vec<Vec<String>> =
                points.iter().map(|p| [p.t, p.x, p.y, p.z, p.norm_sqr].map(sig9).to_vec()).collect();
            write_csv(out, &header, &rows)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoteReport {
    pub scenario: ScenarioDocOut,
    pub horizon: f64,
    pub limits: RateLimits<f64>,
    pub prediction: EquilibriumPrediction<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<ConvergenceCheck<f64>>,
}

/// Limits at the configured horizon; with `state0`, also propagates it to
/// the horizon and compares with the prediction at tolerance `tol`.
pub fn asymptote(
    config: &AnalysisConfig,
    state0: Option<&BlochState<f64>>,
    tol: f64,
) -> Result<AsymptoteReport, CliError> {
    config.validate()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::Config(format!("tolerance must be positive, got {tol}")));
    }
    let sc = config.load_scenario()?;
    let limits = estimate_limits(&sc, config.horizon)?;
    let check = match state0 {
        Some(b) => {
            check_state(b)?;
            Some(verify_convergence(&sc, b, config.horizon, tol)?)
        }
        None => None,
    };
    Ok(AsymptoteReport {
        scenario: sc.to_document(),
        horizon: config.horizon,
        prediction: predict_equilibrium(&limits),
        limits,
        check,
    })
}

pub fn run_asymptote(config: &AnalysisConfig, state0: Option<&BlochState<f64>>, tol: f64) -> Result<(), CliError> {
    let report = asymptote(config, state0, tol)?;
    match config.format {
        Format::Json => write_json(config.out.as_deref(), &report),
        Format::Csv => Err(CliError::Config("asymptote output is JSON only".into())),
    }
}
