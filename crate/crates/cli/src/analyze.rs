// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! The `analyze` report: verdicts, Choi spectra on the grid, oracle
//! cross-checks and the asymptotic prediction.

use qmap::asymptote::{estimate_limits, predict_equilibrium, EquilibriumPrediction, RateLimits};
use qmap::classify::{cp_margin_at, p_margin_at, GridSamples};
use qmap::oracle::{
    oracle_cp, oracle_positivity, quadratic_p_analysis, DEFAULT_POSITIVITY_SAMPLES, DEFAULT_PROBE_SAMPLES,
};
use qmap::ratefn::ScenarioDocOut;
use qmap::{
    choi_eigenvalues, ChoiBranch, ClassificationReport, GridSpec, MapSnapshot, OracleResult, Property,
    QuadraticAnalysis, Real, Scenario,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{AnalysisConfig, Format};
use crate::error::{CliError, Outcome};
use crate::output::{bool_cell, sig9, write_csv, write_json};

/// Evenly spaced grid points handed to the oracles, on top of the CP and P
/// argmin times.
pub const ORACLE_POINTS: usize = 21;

/// Margins closer to zero than this are not held to oracle agreement.
pub const ORACLE_EXEMPT_BAND: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct ChoiPoint {
    pub t: f64,
    pub eigenvalues: [f64; 4],
    pub min_branch: ChoiBranch,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleCheck {
    pub t: f64,
    pub cp_margin: f64,
    pub p_margin: f64,
    pub cp: OracleResult<f64>,
    pub positivity: OracleResult<f64>,
    pub quadratic: QuadraticAnalysis<f64>,
    /// Both margins lie in the exempt band.
    pub exempt: bool,
    pub agrees: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub positivity_samples: usize,
    pub probe_samples: usize,
    pub exempt_band: f64,
    pub checks: Vec<OracleCheck>,
    pub agrees_with_classifier: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Asymptotics {
    pub horizon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limits: Option<RateLimits<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction: Option<EquilibriumPrediction<f64>>,
    /// Set when the rates could not be sampled up to the horizon.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub scenario: ScenarioDocOut,
    pub config: AnalysisConfig,
    pub verdicts: ClassificationReport<f64>,
    pub choi: Vec<ChoiPoint>,
    pub oracle: Option<OracleSummary>,
    pub asymptotics: Asymptotics,
    pub seed: u64,
}

/// Everything `analyze` computes, before it is written out.
pub struct Analysis {
    pub report: AnalysisReport,
    pub samples: GridSamples<f64>,
}

fn oracle_times(samples: &GridSamples<f64>, report: &ClassificationReport<f64>) -> Vec<f64> {
    let n = samples.samples.len();
    let mut ts: Vec<f64> = (0..ORACLE_POINTS).map(|k| samples.samples[k * (n - 1) / (ORACLE_POINTS - 1)].t).collect();
    ts.push(report.get(Property::CP).argmin_time);
    ts.push(report.get(Property::P).argmin_time);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

fn oracle_check(scenario: &Scenario, samples: &GridSamples<f64>, t: f64, seed: u64) -> Result<OracleCheck, CliError> {
    let k = samples.samples.partition_point(|g| g.t < t);
    let acc = samples.samples[k].acc;
    let cp = oracle_cp(scenario, t, DEFAULT_PROBE_SAMPLES, seed)?;
    let positivity = oracle_positivity(scenario, t, DEFAULT_POSITIVITY_SAMPLES, seed)?;
    let quadratic = quadratic_p_analysis(scenario, t)?;
    let (cp_margin, p_margin) = (cp_margin_at(&acc), p_margin_at(&acc));
    let eps = f64::verdict_eps();
    let in_band = |m: f64| m.abs() < ORACLE_EXEMPT_BAND;
    let cp_ok = in_band(cp_margin) || (cp_margin >= -eps) == cp.passed;
    let p_ok =
        in_band(p_margin) || ((p_margin >= -eps) == positivity.passed && (p_margin >= -eps) == quadratic.positive);
    Ok(OracleCheck {
        t,
        cp_margin,
        p_margin,
        cp,
        positivity,
        quadratic,
        exempt: in_band(cp_margin) && in_band(p_margin),
        agrees: cp_ok && p_ok,
    })
}

fn asymptotics(scenario: &Scenario, horizon: f64) -> Asymptotics {
    match estimate_limits(scenario, horizon) {
        Ok(limits) => {
            Asymptotics { horizon, prediction: Some(predict_equilibrium(&limits)), limits: Some(limits), error: None }
        }
        Err(e) => Asymptotics { horizon, limits: None, prediction: None, error: Some(e.to_string()) },
    }
}

pub fn analyze(config: &AnalysisConfig) -> Result<Analysis, CliError> {
    config.validate()?;
    let scenario = config.load_scenario()?;
    let grid = GridSpec::new(config.t_max, config.grid)?;
    let samples = GridSamples::collect(&scenario, grid)?;
    let verdicts = samples.report();
    let choi = samples
        .samples
        .iter()
        .map(|g| {
            let spectrum = choi_eigenvalues(&MapSnapshot::from_accumulated(g.acc));
            ChoiPoint { t: g.t, eigenvalues: spectrum.eigenvalues, min_branch: spectrum.min_branch() }
        })
        .collect();
    let oracle = if config.oracle {
        let checks = oracle_times(&samples, &verdicts)
            .into_par_iter()
            .map(|t| oracle_check(&scenario, &samples, t, config.seed))
            .collect::<Result<Vec<_>, _>>()?;
        Some(OracleSummary {
            positivity_samples: DEFAULT_POSITIVITY_SAMPLES,
            probe_samples: DEFAULT_PROBE_SAMPLES,
            exempt_band: ORACLE_EXEMPT_BAND,
            agrees_with_classifier: checks.iter().all(|c| c.agrees),
            checks,
        })
    } else {
        None
    };
    let report = AnalysisReport {
        scenario: scenario.to_document(),
        config: config.clone(),
        verdicts,
        choi,
        oracle,
        asymptotics: asymptotics(&scenario, config.horizon),
        seed: config.seed,
    };
    Ok(Analysis { report, samples })
}

const CSV_HEADER: [&str; 20] = [
    "t",
    "gamma_plus",
    "gamma_minus",
    "Gamma",
    "omega",
    "gamma_tilde_plus",
    "Gamma_tilde",
    "omega_tilde",
    "s",
    "margin_M",
    "margin_QM",
    "margin_CP",
    "margin_P",
    "gkls_min",
    "choi_0",
    "choi_1",
    "choi_2",
    "choi_3",
    "CP",
    "P",
];

fn csv_rows(a: &Analysis) -> Vec<Vec<String>> {
    let margins: Vec<&[f64]> = Property::ALL.iter().map(|&p| a.report.verdicts.get(p).margins.as_slice()).collect();
    let eps = f64::verdict_eps();
    a.samples
        .samples
        .iter()
        .zip(&a.report.choi)
        .enumerate()
        .map(|(k, (g, c))| {
            let r = &g.rates;
            let acc = &g.acc;
            let mut row: Vec<String> = [
                g.t,
                r.gamma_plus,
                r.gamma_minus,
                r.gamma,
                r.omega,
                acc.gamma_tilde_plus,
                acc.gamma_tilde,
                acc.omega_tilde,
                acc.s,
            ]
            .into_iter()
            .chain(margins.iter().map(|m| m[k]))
            .chain(c.eigenvalues)
            .map(sig9)
            .collect();
            // Property::ALL is M, QM, CP, P, NM
            row.push(bool_cell(margins[2][k] >= -eps).into());
            row.push(bool_cell(margins[3][k] >= -eps).into());
            row
        })
        .collect()
}

/// Runs the analysis and writes the report in the configured format.
pub fn run_analyze(config: &AnalysisConfig) -> Result<Outcome, CliError> {
    let a = analyze(config)?;
    let out = config.out.as_deref();
    match config.format {
        Format::Json => write_json(out, &a.report)?,
        Format::Csv => {
            let header: Vec<String> = CSV_HEADER.iter().map(|s| s.to_string()).collect();
            write_csv(out, &header, &csv_rows(&a))?
        }
    }
    Ok(Outcome::from_consistent(a.report.verdicts.chain_consistent))
}
