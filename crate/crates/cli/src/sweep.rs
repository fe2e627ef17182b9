// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Verdicts as a function of one scenario parameter.

use qmap::classify::GridSamples;
use qmap::{GridSpec, Property};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{AnalysisConfig, Format};
use crate::error::{CliError, Outcome};
use crate::output::{bool_cell, sig9, write_csv, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    /// In the order M, QM, CP, P, NM.
    pub holds: [bool; 5],
    pub margins: [f64; 5],
    pub chain_consistent: bool,
}

impl SweepRow {
    pub fn holds(&self, p: Property) -> bool {
        self.holds[Property::ALL.iter().position(|&q| q == p).unwrap()]
    }

    pub fn margin(&self, p: Property) -> f64 {
        self.margins[Property::ALL.iter().position(|&q| q == p).unwrap()]
    }
}

/// `steps` values from `from` to `to`, both included.
pub fn sweep_values(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![from],
        _ => (0..steps)
            .map(|k| if k + 1 == steps { to } else { from + (to - from) * k as f64 / (steps - 1) as f64 })
            .collect(),
    }
}

/// One row per parameter value, in parameter order. Points run in parallel.
pub fn sweep(
    config: &AnalysisConfig,
    param: &str,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<Vec<SweepRow>, CliError> {
    config.validate()?;
    if !(from.is_finite() && to.is_finite()) {
        return Err(CliError::Config(format!("sweep bounds must be finite, got [{from}, {to}]")));
    }
    if steps == 0 {
        return Err(CliError::Config("sweep needs at least one step".into()));
    }
    let base = config.load_scenario()?;
    // fail early, before any work is scheduled
    base.with_param(param, from)?;
    let grid = GridSpec::new(config.t_max, config.grid)?;
    sweep_values(from, to, steps)
        .into_par_iter()
        .map(|value| {
            let sc = base.with_param(param, value)?;
            let report = GridSamples::collect(&sc, grid)?.report();
            Ok(SweepRow {
                value,
                holds: Property::ALL.map(|p| report.holds(p)),
                margins: Property::ALL.map(|p| report.get(p).margin_min),
                chain_consistent: report.chain_consistent,
            })
        })
        .collect()
}

pub fn csv_header() -> Vec<String> {
    let mut h = vec!["value".to_string()];
    h.extend(Property::ALL.iter().map(|p| p.name().to_string()));
    h.extend(Property::ALL.iter().map(|p| format!("margin_{}", p.name())));
    h
}

pub fn csv_row(r: &SweepRow) -> Vec<String> {
    let mut row = vec![sig9(r.value)];
    row.extend(r.holds.iter().map(|&b| bool_cell(b).to_string()));
    row.extend(r.margins.iter().map(|&m| sig9(m)));
    row
}

pub fn run_sweep(config: &AnalysisConfig, param: &str, from: f64, to: f64, steps: usize) -> Result<Outcome, CliError> {
    let rows = sweep(config, param, from, to, steps)?;
    let out = config.out.as_deref();
    match config.format {
        Format::Csv => write_csv(out, &csv_header(), &rows.iter().map(csv_row).collect::<Vec<_>>())?,
        Format::Json => write_json(out, &rows)?,
    }
    Ok(Outcome::from_consistent(rows.iter().all(|r| r.chain_consistent)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_hit_both_ends() {
        let v = sweep_values(0.0, 1.0, 21);
        assert_eq!(v.len(), 21);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[10], 0.5);
        assert_eq!(v[20], 1.0);
    }

    #[test]
    fn header_lists_properties() {
        assert_eq!(csv_header()[..6], ["value", "M", "QM", "CP", "P", "NM"]);
    }
}
