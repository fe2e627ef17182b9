// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Floating-point scalar abstraction shared by every numerical routine.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type the analysis runs in: `f32` or `f64`.
///
/// The associated tolerances are the defaults used by quadrature, the ODE
/// integrator, the classifier and the oracles. They are tight for `f64` and
/// scaled to the available precision for `f32`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Absolute and relative tolerance of the adaptive Simpson rule.
    fn quad_tol() -> Self;
    /// Absolute and relative tolerance of the embedded Runge-Kutta pair.
    fn ode_tol() -> Self;
    /// Equality band of the classifier margins.
    fn verdict_eps() -> Self;
    /// Equality band of the brute-force oracles.
    fn oracle_eps() -> Self;

    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn quad_tol() -> Self {
        1e-10
    }
    fn ode_tol() -> Self {
        1e-10
    }
    fn verdict_eps() -> Self {
        1e-9
    }
    fn oracle_eps() -> Self {
        1e-7
    }
}

impl Real for f32 {
    fn quad_tol() -> Self {
        1e-5
    }
    fn ode_tol() -> Self {
        1e-5
    }
    fn verdict_eps() -> Self {
        1e-4
    }
    fn oracle_eps() -> Self {
        1e-3
    }
}
