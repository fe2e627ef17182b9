// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded generator of random bounded scenarios for property checks.
//!
//! Rates are short sums of constants, sinusoids, decaying exponentials,
//! `tanh` ramps and `1/(1+t)` tails with coefficients rounded to three
//! decimals. A share of the scenarios is pinned to the boundaries that the
//! classifier has to get right: `γ₋ = ±γ₊` (extremal population transfer)
//! and `Γ = γ₊/2` (vanishing dephasing rate `γ₃`).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ratefn::{Convention, Scenario};

fn coeff(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo..=hi) * 1000.0).round() / 1000.0
}

fn num(v: f64) -> String {
    if v < 0.0 {
        format!("({v})")
    } else {
        format!("{v}")
    }
}

fn term(rng: &mut impl Rng, scale: f64) -> String {
    let c = num(coeff(rng, -scale, scale));
    match rng.gen_range(0..5) {
        0 => c,
        1 => format!("{c}*sin({}*t + {})", coeff(rng, 0.1, 2.0), coeff(rng, 0.0, std::f64::consts::PI)),
        2 => format!("{c}*exp(-{}*t)", coeff(rng, 0.1, 2.0)),
        3 => format!("{c}*tanh({}*t)", coeff(rng, 0.1, 2.0)),
        _ => format!("{c}/(1 + t)"),
    }
}

fn sum(rng: &mut impl Rng, base: (f64, f64), scale: f64, max_terms: usize) -> String {
    let mut s = num(coeff(rng, base.0, base.1));
    for _ in 0..rng.gen_range(0..=max_terms) {
        s.push_str(" + ");
        s.push_str(&term(rng, scale));
    }
    s
}

/// One random scenario named `fuzz-{index}`.
pub fn random_scenario(rng: &mut impl Rng, index: usize) -> Scenario {
    let gp = sum(rng, (-0.3, 2.0), 1.0, 2);
    let gm = match rng.gen_range(0..6) {
        0 => gp.clone(),
        1 => format!("-({gp})"),
        2 => "0".to_string(),
        3 => format!("{} * ({gp})", coeff(rng, -1.0, 1.0)),
        _ => sum(rng, (-1.0, 1.0), 0.8, 2),
    };
    let gamma = match rng.gen_range(0..5) {
        0 => format!("({gp})/2"),
        1 => format!("({gp})/2 + {}", sum(rng, (-0.3, 0.8), 0.5, 1)),
        _ => sum(rng, (-0.3, 1.5), 0.8, 2),
    };
    let omega = match rng.gen_range(0..3) {
        0 => "0".to_string(),
        1 => num(coeff(rng, -3.0, 3.0)),
        _ => format!("{}*sin({}*t)", num(coeff(rng, -2.0, 2.0)), coeff(rng, 0.1, 2.0)),
    };
    Scenario::from_sources(
        format!("fuzz-{index}"),
        BTreeMap::new(),
        Convention::SumDifference,
        [&gp, &gm],
        &gamma,
        &omega,
    )
    .expect("generated rates parse")
}

/// `count` scenarios from a fixed seed.
pub fn fuzz_scenarios(seed: u64, count: usize) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_scenario(&mut rng, i)).collect()
}
