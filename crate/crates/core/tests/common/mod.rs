// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::collections::BTreeMap;

use qmap::fuzz::random_scenario;
use qmap::{Convention, Scenario};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A fuzz scenario determined by `seed` alone.
pub fn seeded_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_scenario(&mut rng, seed as usize)
}

pub fn custom(gamma_plus: &str, gamma_minus: &str, gamma: &str, omega: &str) -> Scenario {
    Scenario::from_sources(
        "custom",
        BTreeMap::new(),
        Convention::SumDifference,
        [gamma_plus, gamma_minus],
        gamma,
        omega,
    )
    .unwrap()
}

pub fn preset(name: &str, params: &[(&str, f64)]) -> Scenario {
    let o: BTreeMap<_, _> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    Scenario::preset(name, &o).unwrap()
}
