// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::expr::{BoundExpr, EvalError, Expr, Func, ParseError, TIME_VAR};
use super::presets;
use crate::scalar::Real;

/// Which of the four scenario rates an error or query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rate {
    GammaPlus,
    GammaMinus,
    Gamma,
    Omega,
}

impl Rate {
    pub fn name(self) -> &'static str {
        match self {
            Rate::GammaPlus => "gamma_plus",
            Rate::GammaMinus => "gamma_minus",
            Rate::Gamma => "Gamma",
            Rate::Omega => "omega",
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("malformed scenario document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("rate `{rate}`: {source}")]
    Parse {
        rate: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("rate `{rate}` references undeclared parameter `{name}`")]
    UndeclaredParameter { rate: &'static str, name: String },
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("parameter name `{0}` is reserved")]
    ReservedParameter(String),
    #[error("parameter `{0}` is not a finite number")]
    NonFiniteParameter(String),
    #[error("both gamma12/gamma21 and gamma_plus/gamma_minus supplied")]
    AmbiguousConvention,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

/// Instantaneous values of the four rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateValues<T> {
    pub gamma_plus: T,
    pub gamma_minus: T,
    pub gamma: T,
    pub omega: T,
}

impl<T: Real> RateValues<T> {
    pub fn get(&self, which: Rate) -> T {
        match which {
            Rate::GammaPlus => self.gamma_plus,
            Rate::GammaMinus => self.gamma_minus,
            Rate::Gamma => self.gamma,
            Rate::Omega => self.omega,
        }
    }

    pub fn gkls(&self) -> GklsRates<T> {
        let half = T::lit(0.5);
        GklsRates {
            gamma1: half * (self.gamma_plus + self.gamma_minus),
            gamma2: half * (self.gamma_plus - self.gamma_minus),
            gamma3: self.gamma - half * self.gamma_plus,
        }
    }
}

/// Rates of the GKLS-like form: `gamma1 = γ₁₂`, `gamma2 = γ₂₁`,
/// `gamma3 = Γ − γ₊/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GklsRates<T> {
    pub gamma1: T,
    pub gamma2: T,
    pub gamma3: T,
}

impl<T: Real> GklsRates<T> {
    pub fn min(&self) -> T {
        self.gamma1.min(self.gamma2).min(self.gamma3)
    }
}

/// How the population rates were supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `gamma12` / `gamma21`
    Transition,
    /// `gamma_plus` / `gamma_minus`
    SumDifference,
}

/// Population-rate input in either convention.
#[derive(Debug, Clone)]
pub enum PopulationRates {
    Transition { gamma12: Expr, gamma21: Expr },
    SumDifference { gamma_plus: Expr, gamma_minus: Expr },
}

/// A two-level model: four time-dependent rates plus named parameters.
///
/// Population rates are stored as `γ₊ = γ₂₁ + γ₁₂` and `γ₋ = γ₁₂ − γ₂₁`
/// whatever convention they were supplied in. Immutable once built.
#[derive(Debug, Clone)]
pub struct Scenario {
    name: String,
    params: BTreeMap<String, f64>,
    convention: Convention,
    gamma_plus: Expr,
    gamma_minus: Expr,
    gamma: Expr,
    omega: Expr,
    bound: [BoundExpr; 4],
}

fn is_reserved(name: &str) -> bool {
    name == TIME_VAR || Func::from_name(name).is_some()
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        params: BTreeMap<String, f64>,
        population: PopulationRates,
        gamma: Expr,
        omega: Expr,
    ) -> Result<Self, ScenarioError> {
        let (convention, gamma_plus, gamma_minus) = match population {
            PopulationRates::Transition { gamma12, gamma21 } => {
                (Convention::Transition, gamma21.clone() + gamma12.clone(), gamma12 - gamma21)
            }
            PopulationRates::SumDifference { gamma_plus, gamma_minus } => {
                (Convention::SumDifference, gamma_plus, gamma_minus)
            }
        };
        for (k, v) in &params {
            if is_reserved(k) {
                return Err(ScenarioError::ReservedParameter(k.clone()));
            }
            if !v.is_finite() {
                return Err(ScenarioError::NonFiniteParameter(k.clone()));
            }
        }
        let exprs = [
            (Rate::GammaPlus, &gamma_plus),
            (Rate::GammaMinus, &gamma_minus),
            (Rate::Gamma, &gamma),
            (Rate::Omega, &omega),
        ];
        for (rate, e) in exprs {
            if let Some(name) = e.parameters().into_iter().find(|p| !params.contains_key(p)) {
                return Err(ScenarioError::UndeclaredParameter { rate: rate.name(), name });
            }
        }
        let bind = |e: &Expr| e.bind(&params).expect("parameters checked above");
        let bound = [bind(&gamma_plus), bind(&gamma_minus), bind(&gamma), bind(&omega)];
        Ok(Scenario { name: name.into(), params, convention, gamma_plus, gamma_minus, gamma, omega, bound })
    }

    /// Builds a scenario from rate source strings.
    pub fn from_sources(
        name: impl Into<String>,
        params: BTreeMap<String, f64>,
        convention: Convention,
        population: [&str; 2],
        gamma: &str,
        omega: &str,
    ) -> Result<Self, ScenarioError> {
        let parse =
            |rate: &'static str, src: &str| Expr::parse(src).map_err(|source| ScenarioError::Parse { rate, source });
        let population = match convention {
            Convention::Transition => PopulationRates::Transition {
                gamma12: parse("gamma12", population[0])?,
                gamma21: parse("gamma21", population[1])?,
            },
            Convention::SumDifference => PopulationRates::SumDifference {
                gamma_plus: parse("gamma_plus", population[0])?,
                gamma_minus: parse("gamma_minus", population[1])?,
            },
        };
        Scenario::new(name, params, population, parse("Gamma", gamma)?, parse("omega", omega)?)
    }

    /// Loads a scenario document (JSON).
    pub fn from_json(document: &str) -> Result<Self, ScenarioError> {
        let doc: ScenarioDoc = serde_json::from_str(document)?;
        doc.into_scenario()
    }

    /// Expands a named preset, overriding its default parameters.
    pub fn preset(name: &str, overrides: &BTreeMap<String, f64>) -> Result<Self, ScenarioError> {
        presets::build(name, overrides)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn expr(&self, which: Rate) -> &Expr {
        match which {
            Rate::GammaPlus => &self.gamma_plus,
            Rate::GammaMinus => &self.gamma_minus,
            Rate::Gamma => &self.gamma,
            Rate::Omega => &self.omega,
        }
    }

    /// Same rates with one parameter replaced.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self, ScenarioError> {
        if !self.params.contains_key(name) {
            return Err(ScenarioError::UnknownParameter(name.to_string()));
        }
        let mut params = self.params.clone();
        params.insert(name.to_string(), value);
        Scenario::new(
            self.name.clone(),
            params,
            PopulationRates::SumDifference {
                gamma_plus: self.gamma_plus.clone(),
                gamma_minus: self.gamma_minus.clone(),
            },
            self.gamma.clone(),
            self.omega.clone(),
        )
        .map(|mut s| {
            s.convention = self.convention;
            s
        })
    }

    pub fn rate<T: Real>(&self, which: Rate, t: T) -> Result<T, EvalError> {
        let idx = match which {
            Rate::GammaPlus => 0,
            Rate::GammaMinus => 1,
            Rate::Gamma => 2,
            Rate::Omega => 3,
        };
        self.bound[idx].eval(t)
    }

    pub fn rates_at<T: Real>(&self, t: T) -> Result<RateValues<T>, (Rate, EvalError)> {
        let get = |r: Rate| self.rate(r, t).map_err(|e| (r, e));
        Ok(RateValues {
            gamma_plus: get(Rate::GammaPlus)?,
            gamma_minus: get(Rate::GammaMinus)?,
            gamma: get(Rate::Gamma)?,
            omega: get(Rate::Omega)?,
        })
    }

    /// GKLS rates `(γ₁, γ₂, γ₃)` at time `t`.
    pub fn gkls_rates<T: Real>(&self, t: T) -> Result<GklsRates<T>, (Rate, EvalError)> {
        Ok(self.rates_at(t)?.gkls())
    }

    /// Canonical document form (`gamma_plus`/`gamma_minus` convention).
    pub fn to_document(&self) -> ScenarioDocOut {
        ScenarioDocOut {
            name: self.name.clone(),
            params: self.params.clone(),
            rates: RatesOut {
                gamma_plus: self.gamma_plus.to_string(),
                gamma_minus: self.gamma_minus.to_string(),
                gamma: self.gamma.to_string(),
                omega: self.omega.to_string(),
            },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    name: Option<String>,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    rates: Option<RatesDoc>,
    preset: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RatesDoc {
    gamma12: Option<String>,
    gamma21: Option<String>,
    gamma_plus: Option<String>,
    gamma_minus: Option<String>,
    #[serde(rename = "Gamma")]
    gamma: Option<String>,
    omega: Option<String>,
}

impl ScenarioDoc {
    fn into_scenario(self) -> Result<Scenario, ScenarioError> {
        match (self.rates, self.preset) {
            (Some(_), Some(_)) => Err(ScenarioError::Schema("`rates` and `preset` are mutually exclusive".into())),
            (None, None) => Err(ScenarioError::Schema("one of `rates` or `preset` is required".into())),
            (None, Some(preset)) => {
                let s = presets::build(&preset, &self.params)?;
                Ok(match self.name {
                    Some(n) => Scenario { name: n, ..s },
                    None => s,
                })
            }
            (Some(r), None) => {
                let transition = r.gamma12.is_some() || r.gamma21.is_some();
                let sum_diff = r.gamma_plus.is_some() || r.gamma_minus.is_some();
                let (convention, pair) = match (transition, sum_diff) {
                    (true, true) => return Err(ScenarioError::AmbiguousConvention),
                    (false, false) => {
                        return Err(ScenarioError::Schema(
                            "population rates missing: give gamma12/gamma21 or gamma_plus/gamma_minus".into(),
                        ))
                    }
                    (true, false) => (Convention::Transition, (r.gamma12, r.gamma21)),
                    (false, true) => (Convention::SumDifference, (r.gamma_plus, r.gamma_minus)),
                };
                let (Some(a), Some(b)) = pair else {
                    return Err(ScenarioError::Schema("population rates must come in pairs".into()));
                };
                let gamma = r.gamma.ok_or_else(|| ScenarioError::Schema("`Gamma` is required".into()))?;
                let omega = r.omega.unwrap_or_else(|| "0".into());
                Scenario::from_sources(
                    self.name.unwrap_or_else(|| "custom".into()),
                    self.params,
                    convention,
                    [&a, &b],
                    &gamma,
                    &omega,
                )
            }
        }
    }
}

/// Serialized form of a scenario as embedded in reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioDocOut {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub rates: RatesOut,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatesOut {
    pub gamma_plus: String,
    pub gamma_minus: String,
    #[serde(rename = "Gamma")]
    pub gamma: String,
    pub omega: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none() -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    #[test]
    fn eternal_nm_gkls_at_one() {
        let s = Scenario::preset("eternal_nm", &none()).unwrap();
        let g = s.gkls_rates(1.0).unwrap();
        assert_eq!(g.gamma1, 1.0);
        assert_eq!(g.gamma2, 1.0);
        // γ₃ = (1 − tanh 1) − 1 = −tanh 1
        assert!((g.gamma3 + 1f64.tanh()).abs() < 1e-15);
        assert!((g.gamma3 + 0.7615942).abs() < 5e-8);
    }

    #[test]
    fn identity_gkls_is_zero() {
        let s = Scenario::preset("identity", &none()).unwrap();
        let g = s.gkls_rates(3.0).unwrap();
        assert_eq!((g.gamma1, g.gamma2, g.gamma3), (0.0, 0.0, 0.0));
    }

    #[test]
    fn lossy_cavity_gkls() {
        let s = Scenario::preset("lossy_cavity", &none()).unwrap();
        for t in [0.0, 0.3, 7.0] {
            let r = s.rates_at(t).unwrap();
            assert_eq!((r.gamma_plus, r.gamma_minus, r.gamma), (1.0, 1.0, 0.5));
            let g = r.gkls();
            assert_eq!((g.gamma1, g.gamma2, g.gamma3), (1.0, 0.0, 0.0));
        }
    }

    #[test]
    fn both_conventions_rejected() {
        let doc = r#"{"name":"x","rates":{"gamma12":"1","gamma21":"1","gamma_plus":"2","gamma_minus":"0","Gamma":"1","omega":"0"}}"#;
        assert!(matches!(Scenario::from_json(doc).unwrap_err(), ScenarioError::AmbiguousConvention));
    }

    #[test]
    fn undeclared_parameter_rejected() {
        let doc = r#"{"name":"x","rates":{"gamma12":"k","gamma21":"1","Gamma":"1","omega":"0"}}"#;
        match Scenario::from_json(doc).unwrap_err() {
            ScenarioError::UndeclaredParameter { name, .. } => assert_eq!(name, "k"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn schema_violations() {
        for doc in [
            r#"{"name":"x"}"#,
            r#"{"preset":"identity","rates":{"gamma12":"1","gamma21":"1","Gamma":"1"}}"#,
            r#"{"rates":{"gamma12":"1","Gamma":"1"}}"#,
            r#"{"rates":{"gamma12":"1","gamma21":"1"}}"#,
            r#"{"rates":{"Gamma":"1"}}"#,
        ] {
            assert!(matches!(Scenario::from_json(doc).unwrap_err(), ScenarioError::Schema(_)), "{doc}");
        }
        assert!(matches!(
            Scenario::from_json(r#"{"preset":"identity","colour":"red"}"#).unwrap_err(),
            ScenarioError::Json(_)
        ));
        assert!(matches!(Scenario::from_json(r#"{"preset":"nope"}"#).unwrap_err(), ScenarioError::UnknownPreset(_)));
        assert!(matches!(
            Scenario::from_json(r#"{"preset":"lossy_cavity","params":{"zeta":1}}"#).unwrap_err(),
            ScenarioError::UnknownParameter(_)
        ));
        assert!(matches!(
            Scenario::from_json(r#"{"params":{"t":1},"rates":{"gamma12":"1","gamma21":"1","Gamma":"1"}}"#).unwrap_err(),
            ScenarioError::ReservedParameter(_)
        ));
        assert!(matches!(
            Scenario::from_json(r#"{"rates":{"gamma12":"1+","gamma21":"1","Gamma":"1"}}"#).unwrap_err(),
            ScenarioError::Parse { rate: "gamma12", .. }
        ));
    }

    #[test]
    fn preset_document_with_overrides() {
        let s = Scenario::from_json(r#"{"name":"cav","preset":"lossy_cavity","params":{"gamma":2}}"#).unwrap();
        assert_eq!(s.name(), "cav");
        assert_eq!(s.rates_at(0.0).unwrap().gamma, 1.0);
    }

    #[test]
    fn conventions_agree() {
        let a = Scenario::from_json(
            r#"{"params":{"k":0.3},"rates":{"gamma12":"1+k*sin(t)","gamma21":"0.5*exp(-t)","Gamma":"2","omega":"1"}}"#,
        )
        .unwrap();
        let b = Scenario::from_json(
            r#"{"params":{"k":0.3},"rates":{"gamma_plus":"1+k*sin(t)+0.5*exp(-t)","gamma_minus":"1+k*sin(t)-0.5*exp(-t)","Gamma":"2","omega":"1"}}"#,
        )
        .unwrap();
        for i in 0..50 {
            let t = 0.37 * i as f64;
            let (ga, gb) = (a.gkls_rates(t).unwrap(), b.gkls_rates(t).unwrap());
            assert!((ga.gamma1 - gb.gamma1).abs() < 1e-12);
            assert!((ga.gamma2 - gb.gamma2).abs() < 1e-12);
            assert!((ga.gamma3 - gb.gamma3).abs() < 1e-12);
        }
    }

    #[test]
    fn with_param_rebinds() {
        let s = Scenario::preset("parametric_alpha", &none()).unwrap();
        let s7 = s.with_param("alpha", 0.7).unwrap();
        assert!((s7.rate(Rate::GammaMinus, 0.0).unwrap() - 1.4f64).abs() < 1e-15);
        assert!(matches!(s.with_param("beta", 1.0).unwrap_err(), ScenarioError::UnknownParameter(_)));
    }
}
