// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use common::custom;
use proptest::prelude::*;
use qmap::{estimate_limits, predict_equilibrium, verify_convergence, Accumulator, BlochState, EquilibriumKind};

/// In shifted time `τ = t − 1` the choice
/// `γ₊ = −1/(2√(τ+1))`, `γ₋ = cos(√(τ+1) + π/4)/√(2(τ+1))` with
/// `z₀ = sin 1` has the bounded solution `z = sin √(τ+1)`, whose rates
/// vanish while `z` keeps oscillating.
fn slow_oscillation() -> qmap::Scenario {
    custom("-1/(2*sqrt(t + 1))", "cos(sqrt(t + 1) + 0.7853981633974483)/sqrt(2*(t + 1))", "1", "0")
}

#[test]
fn slow_oscillation_follows_closed_form() {
    let sc = slow_oscillation();
    let mut acc = Accumulator::new(&sc);
    let z0 = 1f64.sin();
    for k in 0..=500 {
        let tau = 0.1 * k as f64;
        let z = acc.propagate(&BlochState::new(0.0, 0.0, z0), tau).unwrap().z;
        let want = (tau + 1.0).sqrt().sin();
        assert!((z - want).abs() < 1e-6, "τ={tau}: {z} vs {want}");
    }
}

#[test]
fn slow_oscillation_is_not_called_convergent() {
    let sc = slow_oscillation();
    for horizon in [50.0, 400.0, 3000.0] {
        let limits = estimate_limits(&sc, horizon).unwrap();
        let kind = predict_equilibrium(&limits).kind;
        assert!(
            !matches!(kind, EquilibriumKind::ConvergesTo(_) | EquilibriumKind::ConvergesLimitUnknown),
            "horizon {horizon}: {kind:?}"
        );
    }
}

fn vanishing(shape: u8, c: f64, k: f64) -> String {
    match shape {
        0 => format!("{c}*exp(-{k}*t)"),
        1 => format!("{c}/(1 + t)^2"),
        2 => format!("{c}/(1 + t)"),
        _ => format!("{c}*exp(-{k}*t)*(1 + 0.5*sin(t))"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vanishing_relaxation_never_predicts_a_point(
        shape in 0u8..4,
        c in 0.1f64..5.0,
        k in 0.1f64..3.0,
        ratio in -1.0f64..1.0,
        g in 0.0f64..2.0,
        horizon in 30.0f64..300.0,
    ) {
        let gp = vanishing(shape, c, k);
        let sc = custom(&gp, &format!("{ratio}*({gp})"), &format!("{g}"), "0");
        let limits = estimate_limits(&sc, horizon).unwrap();
        let kind = predict_equilibrium(&limits).kind;
        prop_assert!(!matches!(kind, EquilibriumKind::ConvergesTo(_)), "{gp}: {kind:?}");
    }

    #[test]
    fn settled_rates_reach_predicted_equilibrium(
        a in 0.2f64..2.0,
        b_frac in -1.0f64..1.0,
        k in 1.0f64..3.0,
        rho in -1.0f64..1.0,
        b2 in -1.0f64..1.0,
        g in 0.2f64..2.0,
        b3 in 0.0f64..1.0,
        w in -2.0f64..2.0,
        theta in 0.0f64..std::f64::consts::PI,
        phi in 0.0f64..std::f64::consts::TAU,
    ) {
        let b = b_frac * a;
        let sc = custom(
            &format!("{a} + ({b})*exp(-{k}*t)"),
            &format!("{} + ({b2})*exp(-{k}*t)", rho * a),
            &format!("{g} + {b3}*exp(-2*t)"),
            &format!("{w}"),
        );
        // z relaxes at rate γ₊⁰ and the coherences at rate Γ⁰
        let horizon = 30f64.max(20.0 / a).max(20.0 / g);
        let state0 = BlochState::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
        let check = verify_convergence(&sc, &state0, horizon, 1e-5).unwrap();
        prop_assert!(matches!(check.prediction.kind, EquilibriumKind::ConvergesTo(_)), "{:?}", check.prediction);
        prop_assert_eq!(check.matches, Some(true), "{:?} vs {:?}", check.final_state, check.prediction);
    }
}
