// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Brute-force checks of positivity and complete positivity that do not use
//! the closed-form conditions or the closed-form Choi spectrum.
//!
//! Both oracles act through [`BlochState::propagate`] only. Positivity is
//! probed by pushing pure states through the map; complete positivity by
//! building the Choi matrix entry by entry from the action of the map on the
//! operators `|i⟩⟨j|` and diagonalizing it with a Jacobi iteration.

pub mod jacobi;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::integrate::{AccumulatedRates, Accumulator, BlochState, IntegrationError};
use crate::ratefn::Scenario;
use crate::scalar::Real;
use jacobi::{hermitian4_eigenvalues, NonConvergence, MAX_SWEEPS};

pub const DEFAULT_SEED: u64 = 0x5eed_0fc0_ffee;
pub const DEFAULT_POSITIVITY_SAMPLES: usize = 1000;
pub const DEFAULT_PROBE_SAMPLES: usize = 500;

type Op2<T> = [[Complex<T>; 2]; 2];

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("at least 100 samples are required, got {0}")]
    Samples(usize),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Eigen(#[from] NonConvergence),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness<T> {
    /// Initial pure state whose image is farthest outside the unit ball.
    State(BlochState<T>),
    /// Position, in descending order, of the smallest numeric Choi eigenvalue.
    ChoiEigen { index: usize, value: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCase<T> {
    pub t: T,
    pub witness: Witness<T>,
    /// How far the worst case is outside the allowed region; zero when inside.
    pub violation_magnitude: T,
}

/// Positivity of `(Φₜ ⊗ I₂)` on random two-qubit pure states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtensionProbe<T> {
    pub samples: usize,
    pub min_eigenvalue: T,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult<T> {
    pub passed: bool,
    pub worst_case: WorstCase<T>,
    /// Largest `x² + y² + z²` reached (positivity oracle).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_norm_sqr: Option<T>,
    /// Numeric Choi spectrum, descending (CP oracle).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<[T; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension_probe: Option<ExtensionProbe<T>>,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn on_sphere<T: Real>(z: T, phi: T) -> BlochState<T> {
    let r = (T::one() - z * z).max(T::zero()).sqrt();
    BlochState::new(r * phi.cos(), r * phi.sin(), z)
}

/// Pure initial states used by [`oracle_positivity`]: the two poles, eight
/// equatorial points, then `n_samples` uniform-area samples.
pub fn positivity_probe_states<T: Real>(n_samples: usize, seed: u64) -> Vec<BlochState<T>> {
    let mut out =
        vec![BlochState::new(T::zero(), T::zero(), T::one()), BlochState::new(T::zero(), T::zero(), -T::one())];
    for k in 0..8 {
        let phi = T::PI() * T::from_usize(k).expect("small integer") / T::lit(4.0);
        out.push(on_sphere(T::zero(), phi));
    }
    let mut rng = rng(seed);
    for _ in 0..n_samples {
        let z: f64 = rng.gen_range(-1.0..=1.0);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        out.push(on_sphere(T::lit(z), T::lit(phi)));
    }
    out
}

/// Pushes pure states through the map at `t` and reports the largest
/// squared norm of the image.
///
/// The best sample is polished with a golden-section search along its
/// meridian, so that an interior maximum of the norm in `z₀` is not missed
/// by the sample spacing.
pub fn oracle_positivity<T: Real>(
    scenario: &Scenario,
    t: T,
    n_samples: usize,
    seed: u64,
) -> Result<OracleResult<T>, OracleError> {
    if n_samples < 100 {
        return Err(OracleError::Samples(n_samples));
    }
    let acc = Accumulator::new(scenario).at(t)?;
    Ok(positivity_at(&acc, n_samples, seed))
}

pub(crate) fn positivity_at<T: Real>(acc: &AccumulatedRates<T>, n_samples: usize, seed: u64) -> OracleResult<T> {
    let norm = |b: &BlochState<T>| b.propagate(acc).norm_sqr();
    let mut best = BlochState::new(T::zero(), T::zero(), T::one());
    let mut best_norm = T::neg_infinity();
    for b in positivity_probe_states::<T>(n_samples, seed) {
        let n = norm(&b);
        if n > best_norm || n.is_nan() {
            best = b;
            best_norm = n;
        }
    }
    if best_norm.is_finite() {
        let phi = best.y.atan2(best.x);
        let width = T::lit(0.05);
        let (mut lo, mut hi) = ((best.z - width).max(-T::one()), (best.z + width).min(T::one()));
        let g = T::lit(0.5) * (T::lit(5.0).sqrt() - T::one());
        for _ in 0..80 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if norm(&on_sphere(a, phi)) >= norm(&on_sphere(b, phi)) {
                hi = b;
            } else {
                lo = a;
            }
        }
        let cand = on_sphere(T::lit(0.5) * (lo + hi), phi);
        let n = norm(&cand);
        if n > best_norm {
            best = cand;
            best_norm = n;
        }
    }
    let excess = best_norm - T::one();
    let violation = if excess.is_nan() { T::infinity() } else { excess.max(T::zero()) };
    OracleResult {
        passed: violation <= T::oracle_eps(),
        worst_case: WorstCase { t: acc.t, witness: Witness::State(best), violation_magnitude: violation },
        max_norm_sqr: Some(best_norm),
        eigenvalues: None,
        extension_probe: None,
    }
}

/// Affine coherence-vector action `r ↦ Λr + c`, read off by propagation.
struct AffineMap<T> {
    lambda: [[T; 3]; 3],
    shift: [T; 3],
}

impl<T: Real> AffineMap<T> {
    fn from_propagation(acc: &AccumulatedRates<T>) -> Self {
        let (o, l) = (T::zero(), T::one());
        let c = BlochState::new(o, o, o).propagate(acc);
        let cols = [
            BlochState::new(l, o, o).propagate(acc),
            BlochState::new(o, l, o).propagate(acc),
            BlochState::new(o, o, l).propagate(acc),
        ];
        let mut lambda = [[o; 3]; 3];
        for (k, col) in cols.iter().enumerate() {
            lambda[0][k] = col.x - c.x;
            lambda[1][k] = col.y - c.y;
            lambda[2][k] = col.z - c.z;
        }
        AffineMap { lambda, shift: [c.x, c.y, c.z] }
    }

    /// Extends the map linearly to an arbitrary 2×2 operator through the
    /// Pauli decomposition `M = m₀I + m·σ`, with `Φ(I) = I + c·σ` and
    /// `Φ(σₖ) = (Λeₖ)·σ`.
    fn apply(&self, m: &Op2<T>) -> Op2<T> {
        let half = T::lit(0.5);
        let i = Complex::new(T::zero(), T::one());
        let m0 = (m[0][0] + m[1][1]) * half;
        let mv = [(m[0][1] + m[1][0]) * half, (m[0][1] - m[1][0]) * i * half, (m[0][0] - m[1][1]) * half];
        let mut r = [Complex::new(T::zero(), T::zero()); 3];
        for (row, r_row) in r.iter_mut().enumerate() {
            *r_row = m0 * self.shift[row];
            for (k, mk) in mv.iter().enumerate() {
                *r_row = *r_row + mk * self.lambda[row][k];
            }
        }
        [[m0 + r[2], r[0] - r[1] * i], [r[0] + r[1] * i, m0 - r[2]]]
    }
}

fn unit<T: Real>(a: usize, b: usize) -> Op2<T> {
    let z = Complex::new(T::zero(), T::zero());
    let mut m = [[z; 2]; 2];
    m[a][b] = Complex::new(T::one(), T::zero());
    m
}

/// Choi matrix `C^{αβ} = ⟨α₁|Φₜ[|α₂⟩⟨β₂|]|β₁⟩` built from the map action.
pub fn numeric_choi_matrix<T: Real>(acc: &AccumulatedRates<T>) -> [[Complex<T>; 4]; 4] {
    let map = AffineMap::from_propagation(acc);
    let z = Complex::new(T::zero(), T::zero());
    let mut c = [[z; 4]; 4];
    for a2 in 0..2 {
        for b2 in 0..2 {
            let img = map.apply(&unit(a2, b2));
            for a1 in 0..2 {
                for b1 in 0..2 {
                    c[2 * a1 + a2][2 * b1 + b2] = img[a1][b1];
                }
            }
        }
    }
    c
}

/// Numeric Choi eigenvalues, descending.
pub fn numeric_choi_eigenvalues<T: Real>(acc: &AccumulatedRates<T>) -> Result<[T; 4], NonConvergence> {
    hermitian4_eigenvalues(&numeric_choi_matrix(acc), MAX_SWEEPS)
}

/// Numeric Choi spectrum at `t` plus the `(Φₜ ⊗ I₂)` probe.
///
/// Passes when the smallest eigenvalue is `≥ −ε_oracle` and no probe state is
/// mapped to an operator with an eigenvalue below `−ε_oracle`. The probe set
/// starts with the maximally entangled state, followed by `probe_samples`
/// Haar-random pure states.
pub fn oracle_cp<T: Real>(
    scenario: &Scenario,
    t: T,
    probe_samples: usize,
    seed: u64,
) -> Result<OracleResult<T>, OracleError> {
    let acc = Accumulator::new(scenario).at(t)?;
    cp_at(&acc, probe_samples, seed)
}

pub(crate) fn cp_at<T: Real>(
    acc: &AccumulatedRates<T>,
    probe_samples: usize,
    seed: u64,
) -> Result<OracleResult<T>, OracleError> {
    let eps = T::oracle_eps();
    let eig = numeric_choi_eigenvalues(acc)?;
    let probe = extension_probe(acc, probe_samples, seed)?;
    let min = eig[3];
    let violation = if min.is_nan() { T::infinity() } else { (-min).max(T::zero()) };
    Ok(OracleResult {
        passed: violation <= eps && probe.passed,
        worst_case: WorstCase {
            t: acc.t,
            witness: Witness::ChoiEigen { index: 3, value: min },
            violation_magnitude: violation,
        },
        max_norm_sqr: None,
        eigenvalues: Some(eig),
        extension_probe: Some(probe),
    })
}

fn extension_probe<T: Real>(
    acc: &AccumulatedRates<T>,
    samples: usize,
    seed: u64,
) -> Result<ExtensionProbe<T>, NonConvergence> {
    let map = AffineMap::from_propagation(acc);
    // images of |a⟩⟨a'| on the system factor
    let images: [[Op2<T>; 2]; 2] = std::array::from_fn(|a| std::array::from_fn(|b| map.apply(&unit(a, b))));
    let z = Complex::new(T::zero(), T::zero());
    let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let bell = [Complex::from(h), z, z, Complex::from(h)];
    let mut rng = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut min = T::infinity();
    for k in 0..=samples {
        let psi = if k == 0 { bell } else { random_pure(&mut rng) };
        // ψ indexed as 2·system + ancilla
        let mut out = [[z; 4]; 4];
        for (kk, ll) in (0..2).flat_map(|k| (0..2).map(move |l| (k, l))) {
            for (a, b) in (0..2).flat_map(|a| (0..2).map(move |b| (a, b))) {
                let w = psi[2 * a + kk] * psi[2 * b + ll].conj();
                for (c, d) in (0..2).flat_map(|c| (0..2).map(move |d| (c, d))) {
                    out[2 * c + kk][2 * d + ll] = out[2 * c + kk][2 * d + ll] + w * images[a][b][c][d];
                }
            }
        }
        let e = hermitian4_eigenvalues(&out, MAX_SWEEPS)?;
        min = min.min(e[3]);
    }
    Ok(ExtensionProbe { samples: samples + 1, min_eigenvalue: min, passed: min >= -T::oracle_eps() })
}

fn random_pure<T: Real>(rng: &mut ChaCha8Rng) -> [Complex<T>; 4] {
    let mut v = [Complex::new(0.0f64, 0.0); 4];
    for c in v.iter_mut() {
        *c = Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.map(|c| Complex::new(T::lit(c.re / n), T::lit(c.im / n)))
}

/// Extremum of `Q(z₀) = a z₀² + b z₀ + c` on `[−1, 1]`, where `Q(z₀) + 1` is
/// the largest squared norm reached at time `t` from a pure state with
/// initial `z₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticAnalysis<T> {
    pub t: T,
    /// `e^{−2γ̃₊} − e^{−2Γ̃}`
    pub a: T,
    /// `2 s e^{−γ̃₊}`
    pub b: T,
    /// `s² − 1 + e^{−2Γ̃}`
    pub c: T,
    /// Vertex `−b/(2a)` when `a < 0`.
    pub z_tilde: Option<T>,
    pub max_q: T,
    pub argmax_z0: T,
    /// `max_q ≤ ε`.
    pub positive: bool,
}

impl<T: Real> QuadraticAnalysis<T> {
    pub fn q(&self, z0: T) -> T {
        (self.a * z0 + self.b) * z0 + self.c
    }

    pub fn from_accumulated(acc: &AccumulatedRates<T>) -> Self {
        let two = T::lit(2.0);
        let e = (-acc.gamma_tilde_plus).exp();
        let em2g = (-two * acc.gamma_tilde).exp_m1();
        let a = (-two * acc.gamma_tilde_plus).exp_m1() - em2g;
        let b = two * acc.s * e;
        let c = acc.s * acc.s + em2g;
        let mut qa = QuadraticAnalysis {
            t: acc.t,
            a,
            b,
            c,
            z_tilde: None,
            max_q: T::zero(),
            argmax_z0: T::zero(),
            positive: true,
        };
        let (q_lo, q_hi) = (qa.q(-T::one()), qa.q(T::one()));
        let (mut arg, mut max) = if q_hi >= q_lo { (T::one(), q_hi) } else { (-T::one(), q_lo) };
        if a < T::zero() {
            let v = -b / (two * a);
            qa.z_tilde = Some(v);
            if v.abs() <= T::one() {
                arg = v;
                max = c - b * b / (T::lit(4.0) * a);
            }
        }
        qa.max_q = max;
        qa.argmax_z0 = arg;
        qa.positive = max <= T::verdict_eps();
        qa
    }
}

pub fn quadratic_p_analysis<T: Real>(scenario: &Scenario, t: T) -> Result<QuadraticAnalysis<T>, IntegrationError> {
    Ok(QuadraticAnalysis::from_accumulated(&Accumulator::new(scenario).at(t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynmap::{choi_eigenvalues, choi_matrix, MapSnapshot};
    use std::collections::BTreeMap;

    fn preset(name: &str, params: &[(&str, f64)]) -> Scenario {
        let o: BTreeMap<_, _> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Scenario::preset(name, &o).unwrap()
    }

    #[test]
    fn probe_states_include_extremes() {
        let s = positivity_probe_states::<f64>(100, 1);
        assert_eq!(s.len(), 110);
        assert_eq!(s[0], BlochState::new(0.0, 0.0, 1.0));
        assert_eq!(s[1], BlochState::new(0.0, 0.0, -1.0));
        assert!(s.iter().all(|b| (b.norm_sqr() - 1.0).abs() < 1e-12));
        assert_eq!(s, positivity_probe_states::<f64>(100, 1));
    }

    #[test]
    fn parametric_alpha_violation() {
        let alpha = 0.7f64;
        let t = 2.0 - 1.0 / alpha;
        let r = oracle_positivity(&preset("parametric_alpha", &[("alpha", alpha)]), t, 1000, 7).unwrap();
        assert!(!r.passed);
        let z_peak = alpha + alpha * (-2.0 + 1.0 / alpha).exp();
        assert!((r.max_norm_sqr.unwrap() - z_peak * z_peak).abs() < 1e-9);
        assert_eq!(r.worst_case.witness, Witness::State(BlochState::new(0.0, 0.0, 1.0)));
    }

    #[test]
    fn identity_passes() {
        for t in [0.0, 1.0, 10.0] {
            let r = oracle_positivity(&preset("identity", &[]), t, 200, 3).unwrap();
            assert!(r.passed && r.worst_case.violation_magnitude < 1e-15);
        }
    }

    #[test]
    fn eternal_nm_positive() {
        for t in [0.5, 1.0, 5.0] {
            assert!(oracle_positivity(&preset("eternal_nm", &[]), t, 500, 11).unwrap().passed);
        }
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(oracle_positivity(&preset("identity", &[]), 1.0f64, 99, 0), Err(OracleError::Samples(99))));
    }

    #[test]
    fn numeric_choi_matches_closed_form_matrix() {
        let mut o = BTreeMap::new();
        o.insert("S".to_string(), 1.7);
        o.insert("gamma".to_string(), 0.4);
        let s = Scenario::preset("lossy_cavity", &o).unwrap();
        let acc = Accumulator::<f64>::new(&s).at(1.3).unwrap();
        let numeric = numeric_choi_matrix(&acc);
        let closed = choi_matrix(&MapSnapshot::from_accumulated(acc));
        for i in 0..4 {
            for j in 0..4 {
                assert!((numeric[i][j] - closed[i][j]).norm() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn eternal_nm_cp_spectrum() {
        let r = oracle_cp(&preset("eternal_nm", &[]), 1.0f64, 100, 5).unwrap();
        let e2 = (-2f64).exp();
        let want = [1.0 + e2, 0.5 * (1.0 - e2), 0.5 * (1.0 - e2), 0.0];
        for (g, w) in r.eigenvalues.unwrap().iter().zip(want) {
            assert!((g - w).abs() < 1e-10);
        }
        assert!(r.passed);
        assert!(r.extension_probe.unwrap().passed);
    }

    #[test]
    fn p_not_cp_fails() {
        let r = oracle_cp(&preset("p_not_cp", &[]), 1.0f64, 100, 5).unwrap();
        assert!(!r.passed);
        let e = (-1f64).exp();
        assert!((r.eigenvalues.unwrap()[3] - (0.5 * (1.0 + e) - 1.0)).abs() < 1e-12);
        // the maximally entangled probe sees half the Choi matrix
        let probe = r.extension_probe.unwrap();
        assert!(!probe.passed);
        assert!((probe.min_eigenvalue - 0.5 * (0.5 * (1.0 + e) - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn origin_cp() {
        let r = oracle_cp(&preset("lossy_cavity", &[]), 0.0f64, 50, 1).unwrap();
        assert!(r.passed);
        let e = r.eigenvalues.unwrap();
        assert!((e[0] - 2.0).abs() < 1e-14 && e[1..].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn quadratic_p_not_cp() {
        let q = quadratic_p_analysis(&preset("p_not_cp", &[]), 1.0f64).unwrap();
        assert!((q.a - ((-2f64).exp() - 1.0)).abs() < 1e-15);
        assert_eq!(q.z_tilde, Some(0.0));
        assert_eq!(q.max_q, 0.0);
        assert!(q.positive);
    }

    #[test]
    fn quadratic_parametric_alpha() {
        let alpha = 0.7f64;
        let t = 2.0 - 1.0 / alpha;
        let s = preset("parametric_alpha", &[("alpha", alpha)]);
        let q = quadratic_p_analysis(&s, t).unwrap();
        let acc = Accumulator::<f64>::new(&s).at(t).unwrap();
        let want = (acc.s + (-t).exp()).powi(2) - 1.0;
        assert!((q.max_q - want).abs() < 1e-12);
        assert_eq!(q.argmax_z0, 1.0);
        assert!(!q.positive);
        let r = oracle_positivity(&s, t, 500, 2).unwrap();
        assert!((r.worst_case.violation_magnitude - q.max_q).abs() < 1e-12);
    }

    #[test]
    fn quadratic_identity() {
        let q = quadratic_p_analysis(&preset("identity", &[]), 0.0f64).unwrap();
        assert_eq!((q.a, q.b, q.c, q.max_q), (0.0, 0.0, 0.0, 0.0));
        assert!(q.positive);
    }

    #[test]
    fn closed_form_and_numeric_spectra_agree_under_rotation() {
        let mut o = BTreeMap::new();
        o.insert("S".to_string(), -2.2);
        let s = Scenario::preset("lossy_cavity", &o).unwrap();
        let acc = Accumulator::<f64>::new(&s).at(0.9).unwrap();
        let closed = choi_eigenvalues(&MapSnapshot::from_accumulated(acc)).eigenvalues;
        let numeric = numeric_choi_eigenvalues(&acc).unwrap();
        for (a, b) in closed.iter().zip(numeric) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
