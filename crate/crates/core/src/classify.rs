// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Grid verdicts for the Markovian (M), quasi-Markovian (QM), completely
//! positive (CP), positive (P) and non-Markovian (NM) properties.
//!
//! Every verdict is a minimum of a per-point margin over a uniform grid on
//! `[0, t_max]`. A property holds when that minimum is `≥ −ε`, with
//! `ε = Real::verdict_eps()`, so maps sitting exactly on a boundary count as
//! holding.
//!
//! The CP and P margins are rescaled from the squared conditions
//! `(1−e^{−γ̃₊})² − s² ≥ 0` (and the matching second-branch forms) to have the
//! units of a Choi eigenvalue:
//!
//! * branch `γ̃₊ ≤ 2Γ̃`: `(1 − e^{−γ̃₊}) − |s|`;
//! * branch `γ̃₊ > 2Γ̃`: `(R − s²) / ((1 − e^{−γ̃₊}) + |s|)`, with `R` the
//!   CP or P bound.
//!
//! The sign, and therefore the verdict, is that of the squared form. At
//! `γ̃₊ = 2Γ̃` both branches reduce to the same value, so the margin is
//! continuous in time. [`cp_residual_at`] and [`p_residual_at`] give the
//! unscaled squared forms.
//!
//! Some standard models sit on the CP boundary for all times. For
//! `eternal_nm` (`γ₊ = 2`, `γ₋ = 0`, `Γ = 1 − tanh t`) the second-branch
//! residual `(1+e^{−γ̃₊})² − 4e^{−2Γ̃}` is identically zero, because
//! `4cosh²t·e^{−2t} = (1+e^{−2t})²`. It does not merely stay above
//! `(1−e^{−2t})²`. The margin is then round-off, and CP holds through `ε`.

use serde::Serialize;
use thiserror::Error;

use crate::dynmap::cp_pair_residual;
use crate::integrate::{AccumulatedRates, Accumulator, IntegrationError};
use crate::ratefn::{EvalError, Rate, RateValues, Scenario};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Property {
    M,
    QM,
    CP,
    P,
    NM,
}

impl Property {
    pub const ALL: [Property; 5] = [Property::M, Property::QM, Property::CP, Property::P, Property::NM];

    pub fn name(self) -> &'static str {
        match self {
            Property::M => "M",
            Property::QM => "QM",
            Property::CP => "CP",
            Property::P => "P",
            Property::NM => "NM",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec<T> {
    pub t_max: T,
    pub n_points: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn new(t_max: T, n_points: usize) -> Result<Self, ClassifyError> {
        if !(t_max > T::zero()) || !t_max.is_finite() || n_points < 2 {
            return Err(ClassifyError::InvalidGrid { t_max: t_max.to_f64_lossy(), n_points });
        }
        Ok(GridSpec { t_max, n_points })
    }

    pub fn spacing(&self) -> T {
        self.t_max / T::from_usize(self.n_points - 1).expect("grid size representable")
    }

    pub fn time(&self, k: usize) -> T {
        if k + 1 == self.n_points {
            return self.t_max;
        }
        self.t_max * T::from_usize(k).expect("grid index representable")
            / T::from_usize(self.n_points - 1).expect("grid size representable")
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_points).map(move |k| self.time(k))
    }
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("invalid grid: t_max = {t_max}, n = {n_points} (need t_max > 0, n ≥ 2)")]
    InvalidGrid { t_max: f64, n_points: usize },
    #[error("rate `{}` at t = {t}: {source}", rate.name())]
    Rate {
        rate: Rate,
        t: f64,
        #[source]
        source: EvalError,
    },
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}

/// Rates and accumulated rates at one grid time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSample<T> {
    pub t: T,
    pub rates: RateValues<T>,
    pub acc: AccumulatedRates<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict<T> {
    pub property: Property,
    pub holds: bool,
    /// Minimum margin over the grid. For NM this is the most negative GKLS
    /// rate, and `holds` means it is below `−ε`.
    pub margin_min: T,
    pub argmin_time: T,
    /// First grid time at which the property fails. For NM, which fails only
    /// by never witnessing a negative rate, this is the time of the smallest
    /// rate.
    pub first_violation_time: Option<T>,
    /// NM only: first grid time with a rate below `−ε`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_time: Option<T>,
    pub grid: GridSpec<T>,
    #[serde(skip)]
    pub margins: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport<T> {
    /// In the order M, QM, CP, P, NM.
    pub verdicts: Vec<Verdict<T>>,
    pub chain_consistent: bool,
}

impl<T: Real> ClassificationReport<T> {
    pub fn get(&self, property: Property) -> &Verdict<T> {
        self.verdicts.iter().find(|v| v.property == property).expect("every property present")
    }

    pub fn holds(&self, property: Property) -> bool {
        self.get(property).holds
    }

    /// Broken links of M ⇒ QM ⇒ CP ⇒ P as `(premise, conclusion)` pairs.
    pub fn chain_violations(&self) -> Vec<(Property, Property)> {
        use Property::*;
        [(M, QM), (QM, CP), (CP, P)].into_iter().filter(|&(a, b)| self.holds(a) && !self.holds(b)).collect()
    }
}

/// Rates and accumulated rates on a grid, shared by all five verdicts.
#[derive(Debug, Clone)]
pub struct GridSamples<T> {
    pub grid: GridSpec<T>,
    pub samples: Vec<GridSample<T>>,
}

impl<T: Real> GridSamples<T> {
    pub fn collect(scenario: &Scenario, grid: GridSpec<T>) -> Result<Self, ClassifyError> {
        let mut acc = Accumulator::new(scenario);
        let samples = grid
            .times()
            .map(|t| {
                let rates = scenario.rates_at(t).map_err(|(rate, source)| ClassifyError::Rate {
                    rate,
                    t: t.to_f64_lossy(),
                    source,
                })?;
                Ok(GridSample { t, rates, acc: acc.at(t)? })
            })
            .collect::<Result<Vec<_>, ClassifyError>>()?;
        Ok(GridSamples { grid, samples })
    }

    pub fn verdict(&self, property: Property) -> Verdict<T> {
        let margin: fn(&GridSample<T>) -> T = match property {
            Property::M => |g| markovian_margin(&g.rates),
            Property::QM => |g| quasi_markovian_margin(&g.rates, &g.acc),
            Property::CP => |g| cp_margin_at(&g.acc),
            Property::P => |g| p_margin_at(&g.acc),
            Property::NM => |g| g.rates.gkls().min(),
        };
        let margins: Vec<T> = self.samples.iter().map(margin).collect();
        let eps = T::verdict_eps();
        let (mut k_min, mut m_min) = (0, margins[0]);
        for (k, &m) in margins.iter().enumerate() {
            // NaN margins count as violations
            if m < m_min || (m.is_nan() && !m_min.is_nan()) {
                k_min = k;
                m_min = m;
            }
        }
        let first_below = margins.iter().position(|&m| !(m >= -eps));
        let argmin_time = self.samples[k_min].t;
        let (holds, first_violation_time, witness_time) = if property == Property::NM {
            let holds = first_below.is_some();
            let witness = first_below.map(|k| self.samples[k].t);
            (holds, if holds { None } else { Some(argmin_time) }, witness)
        } else {
            (first_below.is_none(), first_below.map(|k| self.samples[k].t), None)
        };
        Verdict {
            property,
            holds,
            margin_min: m_min,
            argmin_time,
            first_violation_time,
            witness_time,
            grid: self.grid,
            margins,
        }
    }

    pub fn report(&self) -> ClassificationReport<T> {
        let verdicts: Vec<_> = Property::ALL.iter().map(|&p| self.verdict(p)).collect();
        let mut report = ClassificationReport { verdicts, chain_consistent: true };
        report.chain_consistent = report.chain_violations().is_empty();
        report
    }
}

/// `min(2Γ − γ₊, γ₊, γ₊ − γ₋, γ₊ + γ₋)`
pub fn markovian_margin<T: Real>(r: &RateValues<T>) -> T {
    let two = T::lit(2.0);
    (two * r.gamma - r.gamma_plus).min(r.gamma_plus).min(r.gamma_plus - r.gamma_minus).min(r.gamma_plus + r.gamma_minus)
}

/// `min(|γ₊| − γ₋, |γ₊| + γ₋, Γ̃ − γ̃₊/2, γ̃₊)`
pub fn quasi_markovian_margin<T: Real>(r: &RateValues<T>, acc: &AccumulatedRates<T>) -> T {
    let gp = r.gamma_plus.abs();
    (gp - r.gamma_minus)
        .min(gp + r.gamma_minus)
        .min(acc.gamma_tilde - acc.gamma_tilde_plus / T::lit(2.0))
        .min(acc.gamma_tilde_plus)
}

fn first_branch<T: Real>(acc: &AccumulatedRates<T>) -> bool {
    acc.gamma_tilde_plus <= T::lit(2.0) * acc.gamma_tilde
}

/// `(1 − e^{−γ̃₊})² − s²` or `R − s²` in the unscaled squared form.
fn squared_residual<T: Real>(acc: &AccumulatedRates<T>, bound: impl Fn(&AccumulatedRates<T>) -> T) -> T {
    let d = -(-acc.gamma_tilde_plus).exp_m1();
    let s2 = acc.s * acc.s;
    if first_branch(acc) {
        d * d - s2
    } else {
        bound(acc) - s2
    }
}

fn scaled_margin<T: Real>(acc: &AccumulatedRates<T>, bound: impl Fn(&AccumulatedRates<T>) -> T) -> T {
    let d = -(-acc.gamma_tilde_plus).exp_m1();
    let s = acc.s.abs();
    let branch = if first_branch(acc) {
        d - s
    } else {
        let raw = bound(acc) - s * s;
        let denom = d + s;
        if denom > T::zero() {
            raw / denom
        } else {
            raw
        }
    };
    acc.gamma_tilde_plus.min(acc.gamma_tilde).min(branch)
}

fn p_bound<T: Real>(acc: &AccumulatedRates<T>) -> T {
    let two = T::lit(2.0);
    let a = -(-two * acc.gamma_tilde).exp_m1();
    let b = -(-two * (acc.gamma_tilde_plus - acc.gamma_tilde)).exp_m1();
    a * b
}

/// CP margin at one time (see the module docs for the scaling).
pub fn cp_margin_at<T: Real>(acc: &AccumulatedRates<T>) -> T {
    scaled_margin(acc, cp_pair_residual)
}

/// P margin at one time (see the module docs for the scaling).
pub fn p_margin_at<T: Real>(acc: &AccumulatedRates<T>) -> T {
    scaled_margin(acc, p_bound)
}

/// Unscaled CP condition: `(1−e^{−γ̃₊})² − s²` or `(1+e^{−γ̃₊})² − 4e^{−2Γ̃} − s²`.
pub fn cp_residual_at<T: Real>(acc: &AccumulatedRates<T>) -> T {
    squared_residual(acc, cp_pair_residual)
}

/// Unscaled P condition: `(1−e^{−γ̃₊})² − s²` or
/// `(1−e^{−2Γ̃})(1−e^{−2(γ̃₊−Γ̃)}) − s²`.
pub fn p_residual_at<T: Real>(acc: &AccumulatedRates<T>) -> T {
    squared_residual(acc, p_bound)
}

fn check<T: Real>(scenario: &Scenario, t_max: T, n: usize, property: Property) -> Result<Verdict<T>, ClassifyError> {
    Ok(GridSamples::collect(scenario, GridSpec::new(t_max, n)?)?.verdict(property))
}

pub fn check_markovian<T: Real>(scenario: &Scenario, t_max: T, n: usize) -> Result<Verdict<T>, ClassifyError> {
    check(scenario, t_max, n, Property::M)
}

pub fn check_quasi_markovian<T: Real>(scenario: &Scenario, t_max: T, n: usize) -> Result<Verdict<T>, ClassifyError> {
    check(scenario, t_max, n, Property::QM)
}

pub fn check_cp<T: Real>(scenario: &Scenario, t_max: T, n: usize) -> Result<Verdict<T>, ClassifyError> {
    check(scenario, t_max, n, Property::CP)
}

pub fn check_p<T: Real>(scenario: &Scenario, t_max: T, n: usize) -> Result<Verdict<T>, ClassifyError> {
    check(scenario, t_max, n, Property::P)
}

pub fn check_nm<T: Real>(scenario: &Scenario, t_max: T, n: usize) -> Result<Verdict<T>, ClassifyError> {
    check(scenario, t_max, n, Property::NM)
}

/// All five verdicts from one pass over the grid.
pub fn classify_all<T: Real>(
    scenario: &Scenario,
    t_max: T,
    n: usize,
) -> Result<ClassificationReport<T>, ClassifyError> {
    Ok(GridSamples::collect(scenario, GridSpec::new(t_max, n)?)?.report())
}
