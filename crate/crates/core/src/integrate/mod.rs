// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Accumulated rates γ̃₊, Γ̃, ω̃, the particular solution `s` and closed-form
//! propagation of the coherence (Bloch) vector.
//!
//! Integrals are built up on a monotone checkpoint cache: a query at `t`
//! continues from the nearest cached checkpoint `t₀ ≤ t`, so sweeping a grid
//! in increasing order costs one panel per grid step. `s` is advanced with an
//! embedded Runge–Kutta pair on `s' = −γ₊ s + γ₋` rather than through the
//! `e^{−γ̃₊}∫e^{γ̃₊}γ₋` formula, which overflows on long horizons.

pub mod ode;
pub mod quadrature;

use serde::Serialize;
use thiserror::Error;

use crate::ratefn::{EvalError, Rate, Scenario};
use crate::scalar::Real;
use ode::{dopri5, OdeError, OdeOptions};
use quadrature::{adaptive_simpson, QuadError, SimpsonOptions};

/// Time integrals of the rates from 0 to `t`, and `s(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccumulatedRates<T> {
    pub t: T,
    /// ∫₀ᵗ γ₊
    pub gamma_tilde_plus: T,
    /// ∫₀ᵗ Γ
    pub gamma_tilde: T,
    /// ∫₀ᵗ ω
    pub omega_tilde: T,
    /// particular solution of `s' = −γ₊ s + γ₋`, `s(0) = 0`
    pub s: T,
}

impl<T: Real> AccumulatedRates<T> {
    pub fn zero() -> Self {
        AccumulatedRates {
            t: T::zero(),
            gamma_tilde_plus: T::zero(),
            gamma_tilde: T::zero(),
            omega_tilde: T::zero(),
            s: T::zero(),
        }
    }

    pub fn get(&self, which: Integral) -> T {
        match which {
            Integral::GammaPlus => self.gamma_tilde_plus,
            Integral::Gamma => self.gamma_tilde,
            Integral::Omega => self.omega_tilde,
        }
    }
}

/// The three accumulated rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integral {
    GammaPlus,
    Gamma,
    Omega,
}

impl Integral {
    fn rate(self) -> Rate {
        match self {
            Integral::GammaPlus => Rate::GammaPlus,
            Integral::Gamma => Rate::Gamma,
            Integral::Omega => Rate::Omega,
        }
    }
}

/// Coherence-vector coordinates `x = 2Re ρ₂₁`, `y = 2Im ρ₂₁`, `z = ρ₁₁ − ρ₂₂`.
///
/// Points outside the unit ball are representable: non-positive maps produce
/// them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochState<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochState<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        BlochState { x, y, z }
    }

    pub fn norm_sqr(&self) -> T {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// State at the time of `acc`, starting from `self` at time 0.
    pub fn propagate(&self, acc: &AccumulatedRates<T>) -> BlochState<T> {
        let decay = (-acc.gamma_tilde).exp();
        let (sin, cos) = acc.omega_tilde.sin_cos();
        BlochState {
            x: decay * (self.x * cos + self.y * sin),
            y: decay * (-self.x * sin + self.y * cos),
            z: acc.s + self.z * (-acc.gamma_tilde_plus).exp(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IntegrationError {
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("rate `{}` at t = {t}: {source}", rate.name())]
    Rate {
        rate: Rate,
        t: f64,
        #[source]
        source: EvalError,
    },
    #[error("quadrature of `{}` on [{a}, {b}] did not reach tolerance", rate.name())]
    Quadrature { rate: Rate, a: f64, b: f64 },
    #[error("step size underflow integrating s at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step budget exhausted integrating s at t = {t}")]
    StepBudget { t: f64 },
    #[error("accumulated rates overflowed at t = {t}")]
    Overflow { t: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions<T> {
    pub quad: SimpsonOptions<T>,
    pub ode: OdeOptions<T>,
    /// Longest interval handed to one quadrature call.
    pub panel: T,
}

impl<T: Real> Default for IntegrationOptions<T> {
    fn default() -> Self {
        IntegrationOptions { quad: SimpsonOptions::default(), ode: OdeOptions::default(), panel: T::one() }
    }
}

/// Per-analysis integration context with a monotone checkpoint cache.
///
/// Not shared between threads; build one per worker.
pub struct Accumulator<'s, T: Real> {
    scenario: &'s Scenario,
    opts: IntegrationOptions<T>,
    checkpoints: Vec<AccumulatedRates<T>>,
    h_hint: Option<T>,
}

impl<'s, T: Real> Accumulator<'s, T> {
    pub fn new(scenario: &'s Scenario) -> Self {
        Self::with_options(scenario, IntegrationOptions::default())
    }

    pub fn with_options(scenario: &'s Scenario, opts: IntegrationOptions<T>) -> Self {
        Accumulator { scenario, opts, checkpoints: vec![AccumulatedRates::zero()], h_hint: None }
    }

    pub fn scenario(&self) -> &'s Scenario {
        self.scenario
    }

    pub fn checkpoints(&self) -> &[AccumulatedRates<T>] {
        &self.checkpoints
    }

    /// Accumulated rates at `t`, continuing from the nearest checkpoint below.
    pub fn at(&mut self, t: T) -> Result<AccumulatedRates<T>, IntegrationError> {
        if !(t >= T::zero()) {
            return Err(IntegrationError::NegativeTime(t.to_f64_lossy()));
        }
        let idx = self.checkpoints.partition_point(|c| c.t <= t) - 1;
        let base = self.checkpoints[idx];
        if base.t == t {
            return Ok(base);
        }
        let next = self.advance(base, t)?;
        self.checkpoints.insert(idx + 1, next);
        Ok(next)
    }

    pub fn accumulate(&mut self, which: Integral, t: T) -> Result<T, IntegrationError> {
        Ok(self.at(t)?.get(which))
    }

    pub fn s(&mut self, t: T) -> Result<T, IntegrationError> {
        Ok(self.at(t)?.s)
    }

    pub fn propagate(&mut self, state0: &BlochState<T>, t: T) -> Result<BlochState<T>, IntegrationError> {
        Ok(state0.propagate(&self.at(t)?))
    }

    fn advance(&mut self, from: AccumulatedRates<T>, to: T) -> Result<AccumulatedRates<T>, IntegrationError> {
        let mut acc = from;
        while acc.t < to {
            let a = acc.t;
            let b = if to - a > self.opts.panel { a + self.opts.panel } else { to };
            acc = self.panel(acc, b)?;
        }
        Ok(acc)
    }

    fn integral(&self, which: Integral, a: T, b: T) -> Result<T, IntegrationError> {
        let rate = which.rate();
        let scenario = self.scenario;
        let mut f = |x: T| scenario.rate(rate, x).map_err(|e| (x, e));
        adaptive_simpson(&mut f, a, b, &self.opts.quad).map_err(|e| match e {
            QuadError::Integrand((x, source)) => IntegrationError::Rate { rate, t: x.to_f64_lossy(), source },
            QuadError::DepthExceeded { a, b } => IntegrationError::Quadrature { rate, a, b },
            QuadError::EvalBudget => IntegrationError::Quadrature { rate, a: a.to_f64_lossy(), b: b.to_f64_lossy() },
        })
    }

    fn panel(&mut self, acc: AccumulatedRates<T>, b: T) -> Result<AccumulatedRates<T>, IntegrationError> {
        let a = acc.t;
        let gp = self.integral(Integral::GammaPlus, a, b)?;
        let g = self.integral(Integral::Gamma, a, b)?;
        let w = self.integral(Integral::Omega, a, b)?;
        let scenario = self.scenario;
        let mut rhs = |t: T, s: T| {
            let gp = scenario.rate(Rate::GammaPlus, t).map_err(|e| (Rate::GammaPlus, t, e))?;
            let gm = scenario.rate(Rate::GammaMinus, t).map_err(|e| (Rate::GammaMinus, t, e))?;
            Ok(-gp * s + gm)
        };
        let sol = dopri5(&mut rhs, a, acc.s, b, self.h_hint, &self.opts.ode).map_err(|e| match e {
            OdeError::Rhs((rate, t, source)) => IntegrationError::Rate { rate, t: t.to_f64_lossy(), source },
            OdeError::StepUnderflow { t } => IntegrationError::StepUnderflow { t },
            OdeError::StepBudget { t } => IntegrationError::StepBudget { t },
        })?;
        self.h_hint = Some(sol.h_next);
        let next = AccumulatedRates {
            t: b,
            gamma_tilde_plus: acc.gamma_tilde_plus + gp,
            gamma_tilde: acc.gamma_tilde + g,
            omega_tilde: acc.omega_tilde + w,
            s: sol.y,
        };
        let finite = next.gamma_tilde_plus.is_finite()
            && next.gamma_tilde.is_finite()
            && next.omega_tilde.is_finite()
            && next.s.is_finite();
        if !finite {
            return Err(IntegrationError::Overflow { t: b.to_f64_lossy() });
        }
        Ok(next)
    }
}

/// `∫₀ᵗ` of the selected rate.
pub fn accumulate<T: Real>(scenario: &Scenario, which: Integral, t: T) -> Result<T, IntegrationError> {
    Accumulator::new(scenario).accumulate(which, t)
}

/// `s(t)` with `s(0) = 0`.
pub fn particular_solution_s<T: Real>(scenario: &Scenario, t: T) -> Result<T, IntegrationError> {
    Accumulator::new(scenario).s(t)
}

/// Coherence vector at `t` starting from `state0` at time 0.
pub fn propagate_bloch<T: Real>(
    scenario: &Scenario,
    state0: &BlochState<T>,
    t: T,
) -> Result<BlochState<T>, IntegrationError> {
    Accumulator::new(scenario).propagate(state0, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn preset(name: &str) -> Scenario {
        Scenario::preset(name, &BTreeMap::new()).unwrap()
    }

    fn custom(gp: &str, gm: &str, g: &str, w: &str) -> Scenario {
        Scenario::from_sources("custom", BTreeMap::new(), crate::ratefn::Convention::SumDifference, [gp, gm], g, w)
            .unwrap()
    }

    #[test]
    fn zero_at_origin() {
        let s = preset("eternal_nm");
        assert_eq!(Accumulator::<f64>::new(&s).at(0.0).unwrap(), AccumulatedRates::zero());
    }

    #[test]
    fn eternal_nm_gamma_tilde() {
        let s = preset("eternal_nm");
        let v = accumulate(&s, Integral::Gamma, 1.0).unwrap();
        assert!((v - (1.0 - 1f64.cosh().ln())).abs() < 1e-10);
        assert!((v - 0.5662192).abs() < 5e-8);
    }

    #[test]
    fn eternal_nm_gamma_plus_linear() {
        let s = preset("eternal_nm");
        let mut acc = Accumulator::<f64>::new(&s);
        for t in [0.5, 1.0, 3.0, 7.25] {
            assert!((acc.accumulate(Integral::GammaPlus, t).unwrap() - 2.0 * t).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_rate() {
        let s = custom("1", "0", "1", "0");
        assert!((accumulate(&s, Integral::GammaPlus, 2.0).unwrap() - 2.0f64).abs() < 1e-14);
    }

    #[test]
    fn lossy_cavity_s() {
        let s = preset("lossy_cavity");
        let v = particular_solution_s(&s, 1.0).unwrap();
        assert!((v - (1.0 - (-1f64).exp())).abs() < 1e-9);
        assert!((v - 0.6321206).abs() < 5e-8);
    }

    #[test]
    fn vanishing_gamma_minus_gives_zero_s() {
        let s = preset("eternal_nm");
        let mut acc = Accumulator::<f64>::new(&s);
        for t in [0.1, 1.0, 10.0] {
            assert_eq!(acc.s(t).unwrap(), 0.0);
        }
    }

    #[test]
    fn parametric_alpha_s() {
        let s = preset("parametric_alpha");
        let v = particular_solution_s(&s, 2.0).unwrap();
        assert!((v - 0.5 * (1.0 + (-2f64).exp())).abs() < 1e-9);
        assert!((v - 0.5676676).abs() < 5e-8);
    }

    #[test]
    fn pure_rotation() {
        let s = custom("0", "0", "0", "3.141592653589793");
        let b = propagate_bloch(&s, &BlochState::new(1.0f64, 0.0, 0.0), 1.0).unwrap();
        assert!((b.x + 1.0f64).abs() < 1e-12 && b.y.abs() < 1e-12 && b.z == 0.0);
    }

    #[test]
    fn eternal_nm_pole() {
        let s = preset("eternal_nm");
        let b = propagate_bloch(&s, &BlochState::new(0.0f64, 0.0, 1.0), 1.0).unwrap();
        assert_eq!((b.x, b.y), (0.0, 0.0));
        assert!((b.z - (-2f64).exp()).abs() < 1e-12);
        assert!((b.z - 0.1353353).abs() < 5e-8);
    }

    #[test]
    fn origin_is_identity() {
        let s = preset("lossy_cavity");
        let b0 = BlochState::new(0.3, -0.2, 0.4);
        assert_eq!(propagate_bloch(&s, &b0, 0.0).unwrap(), b0);
    }

    #[test]
    fn negative_time_rejected() {
        let s = preset("identity");
        assert!(matches!(Accumulator::<f64>::new(&s).at(-1.0).unwrap_err(), IntegrationError::NegativeTime(_)));
    }

    #[test]
    fn evaluation_error_surfaces() {
        let s = custom("1/(t-1)", "0", "0", "0");
        let err = Accumulator::<f64>::new(&s).at(2.0).unwrap_err();
        assert!(matches!(err, IntegrationError::Rate { .. } | IntegrationError::Quadrature { .. }), "{err:?}");
    }

    #[test]
    fn overflow_flagged() {
        // every sample is finite, the running integral is not
        let s = custom("0", "0", "1e305*(1+t)", "0");
        let err = Accumulator::<f64>::new(&s).at(200.0).unwrap_err();
        assert!(matches!(err, IntegrationError::Overflow { .. }), "{err:?}");
    }

    #[test]
    fn checkpoint_consistency() {
        let s = custom("1 + 0.5*sin(3*t)", "0.2*cos(t)", "0.7 + 0.1*t", "2");
        let mut acc = Accumulator::<f64>::new(&s);
        let a = acc.at(1.3).unwrap();
        let b = acc.at(4.1).unwrap();
        // the later query continued from the cached 1.3
        let mut f = |x: f64| s.rate(Rate::GammaPlus, x);
        let seg = adaptive_simpson(&mut f, 1.3, 4.1, &SimpsonOptions::default()).unwrap();
        assert!((b.gamma_tilde_plus - (a.gamma_tilde_plus + seg)).abs() < 1e-10);
        // out-of-order queries land between checkpoints
        let mid = acc.at(2.0).unwrap();
        assert_eq!(acc.checkpoints().len(), 4);
        assert!(acc.checkpoints().windows(2).all(|w| w[0].t < w[1].t));
        let fresh = Accumulator::<f64>::new(&s).at(2.0).unwrap();
        assert!((mid.gamma_tilde_plus - fresh.gamma_tilde_plus).abs() < 1e-10);
        assert!((mid.s - fresh.s).abs() < 1e-9);
    }

    #[test]
    fn single_precision_context() {
        let s = preset("lossy_cavity");
        let v: f32 = particular_solution_s(&s, 1.0f32).unwrap();
        assert!((v - (1.0 - (-1f32).exp())).abs() < 1e-4);
    }
}
