// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Rate expressions, scenarios and presets.

pub mod expr;
pub mod presets;
mod scenario;

pub use expr::{BinOp, BoundExpr, EvalError, Expr, Func, ParseError};
pub use presets::PRESET_NAMES;
pub use scenario::{
    Convention, GklsRates, PopulationRates, Rate, RateValues, RatesOut, Scenario, ScenarioDocOut, ScenarioError,
};

/// Parses a rate expression.
pub fn parse_rate_expr(source: &str) -> Result<Expr, ParseError> {
    Expr::parse(source)
}
