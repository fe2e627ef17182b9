// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Long-time limits of the rates and the equilibrium they imply.
//!
//! A limit is read off the tail window `[0.8·H, H]` of a finite horizon `H`:
//! the estimate is `f(H)`, and it is *confident* when `f` stays within
//! `limit_tol` of it over the window. Decay is tested by requiring
//! `t^{1+α}·|f(t) − f∞|` to be non-increasing and below `decay_tol` on the
//! window for at least one `α` in `{0.1, 0.5, 1}`, where `f∞` is the estimate
//! snapped to zero when it is within `zero_tol` of it.
//!
//! The prediction rules are:
//!
//! * `γ₊⁰ > 0` and `γ₋⁰` confident: `z → γ₋⁰/γ₊⁰`. The coherences vanish when
//!   `Γ⁰ > 0` confidently or `Γ̃(H) > 40`; the prediction is then the point
//!   `(0, 0, γ₋⁰/γ₊⁰)`. Otherwise the transverse limit is left open.
//! * vanishing rates that all decay fast enough: every bounded solution
//!   converges, but the limit depends on the trajectory.
//! * anything else, including all rates identically zero on the window
//!   (the map is frozen, no asymptotic statement is made): inconclusive.
//!
//! `ω` enters only through the transverse rule: with `Γ̃` bounded the
//! coherences converge only if `ω` also decays.

use serde::Serialize;
use thiserror::Error;

use crate::integrate::{Accumulator, BlochState, Integral, IntegrationError};
use crate::ratefn::{EvalError, Rate, Scenario};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct LimitOptions<T> {
    /// Fraction of the horizon forming the tail window.
    pub tail_fraction: T,
    pub samples: usize,
    pub limit_tol: T,
    /// Threshold on `t^{1+α}·|f − f∞|`.
    pub decay_tol: T,
    pub zero_tol: T,
    pub exponents: [T; 3],
    /// `Γ̃(H)` beyond which coherences count as gone.
    pub transverse_cutoff: T,
}

impl<T: Real> Default for LimitOptions<T> {
    fn default() -> Self {
        LimitOptions {
            tail_fraction: T::lit(0.2),
            samples: 200,
            limit_tol: T::lit(1e-6),
            decay_tol: T::lit(1e-2),
            zero_tol: T::lit(1e-6),
            exponents: [T::lit(0.1), T::lit(0.5), T::one()],
            transverse_cutoff: T::lit(40.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitEstimate<T> {
    pub value: T,
    pub tail_variation: T,
    pub not_too_slowly: bool,
    /// Smallest tested exponent for which the decay test passed.
    pub alpha_test: Option<T>,
    pub confident: bool,
    /// `f` is exactly zero on the whole window.
    pub identically_zero: bool,
}

impl<T: Real> LimitEstimate<T> {
    fn is_zero(&self, opts: &LimitOptions<T>) -> bool {
        self.confident && self.value.abs() <= opts.zero_tol
    }

    fn is_positive(&self, opts: &LimitOptions<T>) -> bool {
        self.confident && self.value > opts.zero_tol
    }

    /// Vanishes fast enough for bounded solutions to converge.
    fn decays(&self, opts: &LimitOptions<T>) -> bool {
        self.is_zero(opts) && self.not_too_slowly
    }
}

#[derive(Debug, Error)]
pub enum AsymptoteError {
    #[error("horizon {0} is below the minimum of 10")]
    Horizon(f64),
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

/// Estimates `lim f(t)` from the tail window ending at `horizon`.
pub fn estimate_limit<T, E, F>(f: &mut F, horizon: T, opts: &LimitOptions<T>) -> Result<LimitEstimate<T>, E>
where
    T: Real,
    F: FnMut(T) -> Result<T, E>,
{
    let n = opts.samples.max(2);
    let start = horizon * (T::one() - opts.tail_fraction);
    let step = (horizon - start) / T::from_usize(n - 1).expect("sample count representable");
    let mut ts = Vec::with_capacity(n);
    let mut fs = Vec::with_capacity(n);
    for k in 0..n {
        let t = if k + 1 == n { horizon } else { start + step * T::from_usize(k).expect("index") };
        ts.push(t);
        fs.push(f(t)?);
    }
    let value = fs[n - 1];
    let tail_variation = fs.iter().fold(T::zero(), |m, &v| m.max((v - value).abs()));
    let confident = tail_variation <= opts.limit_tol;
    let limit = if value.abs() <= opts.zero_tol { T::zero() } else { value };
    let alpha_test = opts.exponents.iter().copied().find(|&alpha| {
        let weighted: Vec<T> =
            ts.iter().zip(&fs).map(|(&t, &v)| t.powf(T::one() + alpha) * (v - limit).abs()).collect();
        let slack = T::lit(64.0) * T::epsilon();
        let monotone = weighted.windows(2).all(|w| w[1] <= w[0] * (T::one() + slack) + T::min_positive_value());
        let small = weighted.iter().all(|&w| w <= opts.decay_tol);
        monotone && small
    });
    Ok(LimitEstimate {
        value,
        tail_variation,
        not_too_slowly: alpha_test.is_some(),
        alpha_test,
        confident,
        identically_zero: fs.iter().all(|v| *v == T::zero()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateLimits<T> {
    pub horizon: T,
    pub gamma_plus: LimitEstimate<T>,
    pub gamma_minus: LimitEstimate<T>,
    pub gamma: LimitEstimate<T>,
    pub omega: LimitEstimate<T>,
    /// `Γ̃(horizon)`, when it could be integrated.
    pub gamma_tilde_horizon: Option<T>,
}

/// Limit estimates for `γ₊`, `γ₋`, `Γ` and `ω`.
pub fn estimate_limits<T: Real>(scenario: &Scenario, horizon: T) -> Result<RateLimits<T>, AsymptoteError> {
    estimate_limits_with(scenario, horizon, &LimitOptions::default())
}

pub fn estimate_limits_with<T: Real>(
    scenario: &Scenario,
    horizon: T,
    opts: &LimitOptions<T>,
) -> Result<RateLimits<T>, AsymptoteError> {
    if !(horizon >= T::lit(10.0)) || !horizon.is_finite() {
        return Err(AsymptoteError::Horizon(horizon.to_f64_lossy()));
    }
    let one = |rate: Rate| {
        estimate_limit(
            &mut |t: T| {
                scenario.rate(rate, t).map_err(|source| AsymptoteError::Rate { rate, t: t.to_f64_lossy(), source })
            },
            horizon,
            opts,
        )
    };
    let gamma_plus = one(Rate::GammaPlus)?;
    let gamma_minus = one(Rate::GammaMinus)?;
    let gamma = one(Rate::Gamma)?;
    let omega = one(Rate::Omega)?;
    // Γ̃ only refines the transverse rule, so failing to integrate it is not fatal
    let gamma_tilde_horizon = Accumulator::new(scenario).accumulate(Integral::Gamma, horizon).ok();
    Ok(RateLimits { horizon, gamma_plus, gamma_minus, gamma, omega, gamma_tilde_horizon })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "state", rename_all = "snake_case")]
pub enum EquilibriumKind<T> {
    ConvergesTo(BlochState<T>),
    ConvergesLimitUnknown,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumPrediction<T> {
    #[serde(flatten)]
    pub kind: EquilibriumKind<T>,
    pub rationale: String,
}

impl<T: Real> EquilibriumPrediction<T> {
    pub fn state(&self) -> Option<BlochState<T>> {
        match self.kind {
            EquilibriumKind::ConvergesTo(b) => Some(b),
            _ => None,
        }
    }
}

pub fn predict_equilibrium<T: Real>(limits: &RateLimits<T>) -> EquilibriumPrediction<T> {
    predict_equilibrium_with(limits, &LimitOptions::default())
}

pub fn predict_equilibrium_with<T: Real>(limits: &RateLimits<T>, opts: &LimitOptions<T>) -> EquilibriumPrediction<T> {
    let (gp, gm, g, w) = (&limits.gamma_plus, &limits.gamma_minus, &limits.gamma, &limits.omega);
    let make = |kind, rationale: String| EquilibriumPrediction { kind, rationale };
    if [gp, gm, g, w].iter().all(|e| e.identically_zero) {
        return make(
            EquilibriumKind::Inconclusive,
            "all rates vanish identically on the tail window; the map is frozen there".into(),
        );
    }
    let transverse_decays =
        g.is_positive(opts) || limits.gamma_tilde_horizon.is_some_and(|v| v > opts.transverse_cutoff);
    let transverse_converges = transverse_decays || (g.decays(opts) && w.decays(opts));
    let population_converges = gp.decays(opts) && gm.decays(opts);

    if gp.is_positive(opts) && gm.confident {
        let z = gm.value / gp.value;
        if transverse_decays {
            return make(
                EquilibriumKind::ConvergesTo(BlochState::new(T::zero(), T::zero(), z)),
                format!(
                    "γ₊ → {} > 0 with γ₋ → {}: bounded solutions of ż = −γ₊z + γ₋ tend to \
                     γ₋⁰/γ₊⁰ = {z}; coherences decay since Γ̃ → ∞",
                    gp.value, gm.value
                ),
            );
        }
        return make(
            EquilibriumKind::ConvergesLimitUnknown,
            format!(
                "z → γ₋⁰/γ₊⁰ = {z}, but Γ̃ stays bounded on the horizon so the coherences keep \
                 a trajectory-dependent{} limit",
                if transverse_converges { "" } else { " or no" }
            ),
        );
    }
    if population_converges && transverse_converges {
        return make(
            EquilibriumKind::ConvergesLimitUnknown,
            format!(
                "γ₊, γ₋ vanish faster than 1/t^{{1+α}} (α = {}): every bounded solution converges, \
                 with a limit that depends on the initial state",
                match (gp.alpha_test, gm.alpha_test) {
                    (Some(a), Some(b)) => a.min(b).to_f64_lossy(),
                    _ => f64::NAN,
                }
            ),
        );
    }
    let reason = if gp.confident && gp.value < -opts.zero_tol {
        "γ₊ tends to a negative limit; solutions are not bounded"
    } else if !gp.confident || !gm.confident {
        "rate limits are not settled on the tail window"
    } else if gp.is_zero(opts) && !population_converges {
        "γ₊ or γ₋ vanishes too slowly; bounded non-convergent solutions are possible"
    } else {
        "coherence rates neither diverge in integral nor decay fast enough"
    };
    make(EquilibriumKind::Inconclusive, reason.into())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceCheck<T> {
    pub prediction: EquilibriumPrediction<T>,
    pub final_state: BlochState<T>,
    /// Componentwise `|final − predicted| < tol`, when a point is predicted.
    pub matches: Option<bool>,
}

/// Propagates `state0` to `horizon` and compares with the predicted
/// equilibrium.
pub fn verify_convergence<T: Real>(
    scenario: &Scenario,
    state0: &BlochState<T>,
    horizon: T,
    tol: T,
) -> Result<ConvergenceCheck<T>, AsymptoteError> {
    let prediction = predict_equilibrium(&estimate_limits(scenario, horizon)?);
    let final_state = Accumulator::new(scenario).propagate(state0, horizon)?;
    let matches = prediction.state().map(|p| {
        (final_state.x - p.x).abs() < tol && (final_state.y - p.y).abs() < tol && (final_state.z - p.z).abs() < tol
    });
    Ok(ConvergenceCheck { prediction, final_state, matches })
}
