// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Complete positivity, positivity and long-time behavior of two-level
//! dynamical maps generated by time-local master equations with
//! time-dependent rates.
//!
//! A [`Scenario`] gives the rates `γ₊(t)`, `γ₋(t)`, `Γ(t)` and `ω(t)` as
//! expressions. From them the crate builds
//!
//! * the accumulated rates `γ̃₊`, `Γ̃`, `ω̃` and the particular solution `s`
//!   ([`integrate`]),
//! * the map matrix, the Choi matrix and its spectrum ([`dynmap`]),
//! * grid verdicts for the M, QM, CP, P and NM properties ([`classify`]),
//! * long-time limits and the predicted equilibrium ([`asymptote`]),
//! * brute-force cross-checks of P and CP ([`oracle`]).
//!
//! Numerical routines are generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar for the common cases.
//!
//! ```
//! use std::collections::BTreeMap;
//! use qmap::{classify_all, Property, Scenario};
//!
//! let s = Scenario::preset("eternal_nm", &BTreeMap::new()).unwrap();
//! let report = classify_all(&s, 20.0f64, 2000).unwrap();
//! assert!(report.holds(Property::CP) && report.holds(Property::NM));
//! assert!(!report.holds(Property::QM));
//! ```

// `!(x >= y)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptote;
pub mod classify;
pub mod dynmap;
mod error;
pub mod fuzz;
pub mod integrate;
pub mod oracle;
pub mod ratefn;
pub mod scalar;

pub use asymptote::{
    estimate_limit, estimate_limits, predict_equilibrium, verify_convergence, ConvergenceCheck, EquilibriumKind,
    EquilibriumPrediction, LimitEstimate, LimitOptions, RateLimits,
};
pub use classify::{
    check_cp, check_markovian, check_nm, check_p, check_quasi_markovian, classify_all, ClassificationReport, GridSpec,
    Property, Verdict,
};
pub use dynmap::{apply_map, choi_eigenvalues, choi_matrix, map_matrix, ChoiBranch, ChoiSpectrum, MapSnapshot};
pub use error::{Error, Result};
pub use integrate::{
    accumulate, particular_solution_s, propagate_bloch, AccumulatedRates, Accumulator, BlochState, Integral,
};
pub use oracle::{oracle_cp, oracle_positivity, quadratic_p_analysis, OracleResult, QuadraticAnalysis};
pub use ratefn::{parse_rate_expr, Convention, Expr, Rate, Scenario};
pub use scalar::Real;

pub type AccumulatedRatesF64 = AccumulatedRates<f64>;
pub type AccumulatedRatesF32 = AccumulatedRates<f32>;
pub type BlochStateF64 = BlochState<f64>;
pub type BlochStateF32 = BlochState<f32>;
pub type MapSnapshotF64 = MapSnapshot<f64>;
pub type MapSnapshotF32 = MapSnapshot<f32>;
pub type ChoiSpectrumF64 = ChoiSpectrum<f64>;
pub type ChoiSpectrumF32 = ChoiSpectrum<f32>;
pub type VerdictF64 = Verdict<f64>;
pub type VerdictF32 = Verdict<f32>;
pub type ClassificationReportF64 = ClassificationReport<f64>;
pub type ClassificationReportF32 = ClassificationReport<f32>;
pub type OracleResultF64 = OracleResult<f64>;
pub type QuadraticAnalysisF64 = QuadraticAnalysis<f64>;
pub type EquilibriumPredictionF64 = EquilibriumPrediction<f64>;
