// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Built-in scenarios.
//!
//! | name               | γ₊ / γ₋ (or γ₁₂ / γ₂₁)    | Γ              | ω     | params               |
//! |--------------------|---------------------------|----------------|-------|----------------------|
//! | `eternal_nm`       | γ₁₂ = γ₂₁ = 1             | `1 - tanh(t)`  | 0     | –                    |
//! | `lossy_cavity`     | γ₊ = γ₋ = `gamma`         | `gamma/2`      | `S/2` | gamma = 1, S = 0     |
//! | `parametric_alpha` | 1 / `alpha*(1+exp(-t))`   | `Gamma`        | 0     | alpha = 0.5, Gamma = 0.6 |
//! | `p_not_cp`         | 1 / 0                     | 0              | 0     | –                    |
//! | `identity`         | 0 / 0                     | 0              | 0     | –                    |

use std::collections::BTreeMap;

use super::scenario::{Convention, Scenario, ScenarioError};

pub const PRESET_NAMES: [&str; 5] = ["eternal_nm", "lossy_cavity", "parametric_alpha", "p_not_cp", "identity"];

struct Preset {
    convention: Convention,
    population: [&'static str; 2],
    gamma: &'static str,
    omega: &'static str,
    defaults: &'static [(&'static str, f64)],
}

fn lookup(name: &str) -> Option<Preset> {
    use Convention::*;
    Some(match name {
        "eternal_nm" => {
            Preset { convention: Transition, population: ["1", "1"], gamma: "1 - tanh(t)", omega: "0", defaults: &[] }
        }
        "lossy_cavity" => Preset {
            convention: SumDifference,
            population: ["gamma", "gamma"],
            gamma: "gamma/2",
            omega: "S/2",
            defaults: &[("gamma", 1.0), ("S", 0.0)],
        },
        "parametric_alpha" => Preset {
            convention: SumDifference,
            population: ["1", "alpha*(1+exp(-t))"],
            gamma: "Gamma",
            omega: "0",
            defaults: &[("alpha", 0.5), ("Gamma", 0.6)],
        },
        "p_not_cp" => {
            Preset { convention: SumDifference, population: ["1", "0"], gamma: "0", omega: "0", defaults: &[] }
        }
        "identity" => {
            Preset { convention: SumDifference, population: ["0", "0"], gamma: "0", omega: "0", defaults: &[] }
        }
        _ => return None,
    })
}

pub(crate) fn build(name: &str, overrides: &BTreeMap<String, f64>) -> Result<Scenario, ScenarioError> {
    let p = lookup(name).ok_or_else(|| ScenarioError::UnknownPreset(name.to_string()))?;
    let mut params: BTreeMap<String, f64> = p.defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in overrides {
        match params.get_mut(k) {
            Some(slot) => *slot = *v,
            None => return Err(ScenarioError::UnknownParameter(k.clone())),
        }
    }
    Scenario::from_sources(name, params, p.convention, p.population, p.gamma, p.omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratefn::Rate;

    #[test]
    fn all_presets_build() {
        for name in PRESET_NAMES {
            let s = build(name, &BTreeMap::new()).unwrap();
            s.rates_at(0.0f64).unwrap();
            s.rates_at(10.0f64).unwrap();
        }
    }

    #[test]
    fn eternal_nm_rates() {
        let s = build("eternal_nm", &BTreeMap::new()).unwrap();
        let r = s.rates_at(2.0f64).unwrap();
        assert_eq!(r.gamma_plus, 2.0);
        assert_eq!(r.gamma_minus, 0.0);
        assert_eq!(r.gamma, 1.0 - 2f64.tanh());
        assert_eq!(r.omega, 0.0);
    }

    #[test]
    fn lossy_cavity_scales_with_gamma() {
        let mut o = BTreeMap::new();
        o.insert("gamma".to_string(), 2.0);
        o.insert("S".to_string(), 0.4);
        let s = build("lossy_cavity", &o).unwrap();
        assert_eq!(s.rate(Rate::Gamma, 0.0f64).unwrap(), 1.0);
        assert_eq!(s.rate(Rate::Omega, 0.0f64).unwrap(), 0.2);
    }
}
