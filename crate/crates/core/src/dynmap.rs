// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! The dynamical map Φₜ as a 4×4 matrix acting on `(ρ₁₁, ρ₁₂, ρ₂₁, ρ₂₂)`,
//! its Choi matrix and the closed-form Choi spectrum.
//!
//! Entries are those obtained by integrating the Redfield equation
//! `ρ̇₁₁ = −γ₂₁ρ₁₁ + γ₁₂ρ₂₂`, `ρ̇₁₂ = (iω − Γ)ρ₁₂`:
//!
//! ```text
//! Φ₁₁ = ½(1+s) + ½e^{−γ̃₊}   Φ₁₄ = ½(1+s) − ½e^{−γ̃₊}
//! Φ₄₁ = ½(1−s) − ½e^{−γ̃₊}   Φ₄₄ = ½(1−s) + ½e^{−γ̃₊}
//! Φ₂₂ = e^{−Γ̃+iω̃}           Φ₃₃ = e^{−Γ̃−iω̃}
//! ```
//!
//! so that `z = ρ₁₁ − ρ₂₂` evolves as `s + z₀e^{−γ̃₊}` and
//! `ρ₂₁ = (x + iy)/2` as `e^{−Γ̃−iω̃}ρ₂₁(0)`, matching
//! [`BlochState::propagate`]. The opposite labelling of the two levels
//! exchanges `s ↔ −s` and `ω̃ ↔ −ω̃`; the Choi spectrum, and with it every CP
//! and P condition, is unchanged by that relabelling.

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::integrate::{AccumulatedRates, Accumulator, BlochState, IntegrationError};
use crate::ratefn::Scenario;
use crate::scalar::Real;

pub type Matrix4<T> = [[Complex<T>; 4]; 4];

/// Density operator flattened as `(ρ₁₁, ρ₁₂, ρ₂₁, ρ₂₂)`.
pub type DensityVector<T> = [Complex<T>; 4];

/// Map matrix at a single time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapSnapshot<T> {
    pub t: T,
    pub acc: AccumulatedRates<T>,
    pub phi: Matrix4<T>,
}

impl<T: Real> MapSnapshot<T> {
    pub fn from_accumulated(acc: AccumulatedRates<T>) -> Self {
        let half = T::lit(0.5);
        let e = (-acc.gamma_tilde_plus).exp();
        let s = acc.s;
        let decay = (-acc.gamma_tilde).exp();
        let (sin, cos) = acc.omega_tilde.sin_cos();
        let mut phi = [[Complex::new(T::zero(), T::zero()); 4]; 4];
        phi[0][0] = Complex::from(half * (T::one() + s) + half * e);
        phi[0][3] = Complex::from(half * (T::one() + s) - half * e);
        phi[3][0] = Complex::from(half * (T::one() - s) - half * e);
        phi[3][3] = Complex::from(half * (T::one() - s) + half * e);
        phi[1][1] = Complex::new(decay * cos, decay * sin);
        phi[2][2] = Complex::new(decay * cos, -decay * sin);
        MapSnapshot { t: acc.t, acc, phi }
    }

    /// `Φ₁₄ = ½(1 + s − e^{−γ̃₊})`, computed without cancellation.
    pub fn phi14(&self) -> T {
        T::lit(0.5) * (-(-self.acc.gamma_tilde_plus).exp_m1() + self.acc.s)
    }

    /// `Φ₄₁ = ½(1 − s − e^{−γ̃₊})`, computed without cancellation.
    pub fn phi41(&self) -> T {
        T::lit(0.5) * (-(-self.acc.gamma_tilde_plus).exp_m1() - self.acc.s)
    }

    /// Applies the map to a density vector. See [`apply_map`].
    pub fn apply(&self, rho0: &DensityVector<T>) -> Result<DensityVector<T>, MapError> {
        apply_map(self, rho0)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("input trace {0} is not 1")]
    Trace(f64),
    #[error("input is not Hermitian")]
    NotHermitian,
}

/// Map matrix at `t`.
pub fn map_matrix<T: Real>(scenario: &Scenario, t: T) -> Result<MapSnapshot<T>, IntegrationError> {
    Ok(MapSnapshot::from_accumulated(Accumulator::new(scenario).at(t)?))
}

/// Choi matrix with entries `C^{αβ} = ⟨α₁|Φₜ[|α₂⟩⟨β₂|]|β₁⟩` over the product
/// basis `α, β ∈ {11, 12, 21, 22}`.
pub fn choi_matrix<T: Real>(snap: &MapSnapshot<T>) -> Matrix4<T> {
    let p = &snap.phi;
    let zero = Complex::new(T::zero(), T::zero());
    let mut c = [[zero; 4]; 4];
    c[0][0] = p[0][0];
    c[3][3] = p[3][3];
    c[0][3] = p[1][1];
    c[3][0] = p[2][2];
    c[1][1] = p[0][3];
    c[2][2] = p[3][0];
    c
}

/// Which closed-form expression produced an eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChoiBranch {
    /// `Φ₁₄`
    Phi14,
    /// `Φ₄₁`
    Phi41,
    /// `½(Φ₁₁+Φ₄₄ + √((Φ₁₁−Φ₄₄)² + 4|Φ₂₂|²))`
    PairPlus,
    /// `½(Φ₁₁+Φ₄₄ − √((Φ₁₁−Φ₄₄)² + 4|Φ₂₂|²))`
    PairMinus,
}

/// Choi eigenvalues sorted descending, each tagged with its branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChoiSpectrum<T> {
    pub eigenvalues: [T; 4],
    pub branches: [ChoiBranch; 4],
}

impl<T: Real> ChoiSpectrum<T> {
    pub fn min(&self) -> T {
        self.eigenvalues[3]
    }

    pub fn min_branch(&self) -> ChoiBranch {
        self.branches[3]
    }

    pub fn sum(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |a, &b| a + b)
    }

    pub fn get(&self, branch: ChoiBranch) -> T {
        let i = self.branches.iter().position(|&b| b == branch).expect("all branches present");
        self.eigenvalues[i]
    }
}

/// Closed-form Choi spectrum.
///
/// The small member of the pair is evaluated as a product,
/// `λ₋ = ((1+e^{−γ̃₊})² − 4e^{−2Γ̃} − s²) / (4λ₊)`, with the numerator built
/// from `expm1` terms so that boundary maps give an exact-looking zero rather
/// than a cancellation residue.
pub fn choi_eigenvalues<T: Real>(snap: &MapSnapshot<T>) -> ChoiSpectrum<T> {
    let acc = &snap.acc;
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let em = (-acc.gamma_tilde_plus).exp_m1();
    let g = (-two * acc.gamma_tilde).exp();
    let s = acc.s;
    let p = two + em;
    let root = (s * s + four * g).sqrt();
    let plus = (p + root) / two;
    let minus = if plus > T::zero() { (cp_pair_residual(acc) - s * s) / (four * plus) } else { (p - root) / two };
    let mut tagged = [
        (snap.phi14(), ChoiBranch::Phi14),
        (snap.phi41(), ChoiBranch::Phi41),
        (plus, ChoiBranch::PairPlus),
        (minus, ChoiBranch::PairMinus),
    ];
    tagged.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    ChoiSpectrum { eigenvalues: tagged.map(|(v, _)| v), branches: tagged.map(|(_, b)| b) }
}

/// `(1+e^{−γ̃₊})² − 4e^{−2Γ̃}` via `expm1`.
pub(crate) fn cp_pair_residual<T: Real>(acc: &AccumulatedRates<T>) -> T {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let a = (-acc.gamma_tilde_plus).exp_m1();
    let b = (-two * acc.gamma_tilde).exp_m1();
    four * a + a * a - four * b
}

/// `Φₜ ρ₀`. Rejects inputs whose trace is not 1 or that are not Hermitian.
pub fn apply_map<T: Real>(snap: &MapSnapshot<T>, rho0: &DensityVector<T>) -> Result<DensityVector<T>, MapError> {
    let tol = T::verdict_eps();
    let trace = rho0[0] + rho0[3];
    if (trace.re - T::one()).abs() > tol {
        return Err(MapError::Trace(trace.re.to_f64_lossy()));
    }
    let off = rho0[1] - rho0[2].conj();
    if rho0[0].im.abs() > tol || rho0[3].im.abs() > tol || off.norm() > tol {
        return Err(MapError::NotHermitian);
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = [zero; 4];
    for (i, row) in snap.phi.iter().enumerate() {
        out[i] = row.iter().zip(rho0).fold(zero, |acc, (a, b)| acc + a * b);
    }
    Ok(out)
}

/// `ρ = ½(I + r·σ)` flattened.
pub fn density_from_bloch<T: Real>(b: &BlochState<T>) -> DensityVector<T> {
    let half = T::lit(0.5);
    [
        Complex::from(half * (T::one() + b.z)),
        Complex::new(half * b.x, -half * b.y),
        Complex::new(half * b.x, half * b.y),
        Complex::from(half * (T::one() - b.z)),
    ]
}

pub fn bloch_from_density<T: Real>(rho: &DensityVector<T>) -> BlochState<T> {
    let two = T::lit(2.0);
    BlochState { x: two * rho[2].re, y: two * rho[2].im, z: rho[0].re - rho[3].re }
}
