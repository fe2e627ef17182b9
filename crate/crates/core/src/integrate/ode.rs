// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Dormand–Prince 5(4) integrator for scalar ODEs `y' = f(t, y)`.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        OdeOptions { rtol: T::ode_tol(), atol: T::ode_tol(), max_steps: 1_000_000 }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OdeError<E> {
    #[error("right-hand side: {0}")]
    Rhs(E),
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step budget exhausted at t = {t}")]
    StepBudget { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSolution<T> {
    pub y: T,
    /// Step size proposed by the controller after the final step.
    pub h_next: T,
    pub steps: usize,
    pub rejected: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn initial_step<T: Real, E>(
    f: &mut impl FnMut(T, T) -> Result<T, E>,
    t0: T,
    y0: T,
    f0: T,
    span: T,
    opts: &OdeOptions<T>,
) -> Result<T, OdeError<E>> {
    let sc = opts.atol + opts.rtol * y0.abs();
    let d0 = y0.abs() / sc;
    let d1 = f0.abs() / sc;
    let small = T::lit(1e-5);
    // keep the first trial step well above the underflow guard in single precision
    let floor = T::lit(1e-6).max(T::lit(100.0) * T::epsilon()) * t0.abs().max(T::one());
    let h0 = if d0 < small || d1 < small { floor } else { T::lit(0.01) * d0 / d1 };
    let h0 = h0.min(span);
    let y1 = y0 + h0 * f0;
    let f1 = f(t0 + h0, y1).map_err(OdeError::Rhs)?;
    let d2 = (f1 - f0).abs() / sc / h0;
    let dmax = d1.max(d2);
    let h1 =
        if dmax <= T::lit(1e-15) { (h0 * T::lit(1e-3)).max(floor) } else { (T::lit(0.01) / dmax).powf(T::lit(0.2)) };
    Ok((T::lit(100.0) * h0).min(h1).max(floor).min(span))
}

/// Integrates forward from `(t0, y0)` to `t1 ≥ t0`.
///
/// `h_hint` seeds the step size (for example the `h_next` of a previous
/// call on an adjacent interval).
pub fn dopri5<T, E, F>(
    f: &mut F,
    t0: T,
    y0: T,
    t1: T,
    h_hint: Option<T>,
    opts: &OdeOptions<T>,
) -> Result<OdeSolution<T>, OdeError<E>>
where
    T: Real,
    F: FnMut(T, T) -> Result<T, E>,
{
    debug_assert!(t1 >= t0);
    let span = t1 - t0;
    if span <= T::zero() {
        return Ok(OdeSolution { y: y0, h_next: h_hint.unwrap_or(T::zero()), steps: 0, rejected: 0 });
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, y).map_err(OdeError::Rhs)?;
    let mut h = match h_hint {
        // a hint left over from a very short panel must not start below the guard
        Some(h) if h > T::zero() => h.max(T::lit(64.0) * T::epsilon() * t0.abs().max(T::one())).min(span),
        _ => initial_step(f, t0, y0, k1, span, opts)?,
    };
    let (mut steps, mut rejected) = (0usize, 0usize);
    let l = T::lit;
    let mut h_next;
    let mut last_rejected = false;
    loop {
        if steps + rejected >= opts.max_steps {
            return Err(OdeError::StepBudget { t: t.to_f64_lossy() });
        }
        let remaining = t1 - t;
        let guard = l(16.0) * T::epsilon() * t.abs().max(T::one());
        if remaining <= guard {
            // a remainder of a few ulps: one Euler step is exact to round-off
            y = y + remaining * k1;
            steps += 1;
            h_next = h;
            break;
        }
        let final_step = h >= remaining;
        let h_step = if final_step { remaining } else { h };
        if h_step <= guard {
            return Err(OdeError::StepUnderflow { t: t.to_f64_lossy() });
        }
        let rhs = |f: &mut F, tt: T, yy: T| f(tt, yy).map_err(OdeError::Rhs);
        let k2 = rhs(f, t + l(C2) * h_step, y + h_step * (l(A21) * k1))?;
        let k3 = rhs(f, t + l(C3) * h_step, y + h_step * (l(A31) * k1 + l(A32) * k2))?;
        let k4 = rhs(f, t + l(C4) * h_step, y + h_step * (l(A41) * k1 + l(A42) * k2 + l(A43) * k3))?;
        let k5 = rhs(f, t + l(C5) * h_step, y + h_step * (l(A51) * k1 + l(A52) * k2 + l(A53) * k3 + l(A54) * k4))?;
        let t_new = if final_step { t1 } else { t + h_step };
        let k6 = rhs(f, t_new, y + h_step * (l(A61) * k1 + l(A62) * k2 + l(A63) * k3 + l(A64) * k4 + l(A65) * k5))?;
        let y_new = y + h_step * (l(A71) * k1 + l(A73) * k3 + l(A74) * k4 + l(A75) * k5 + l(A76) * k6);
        let k7 = rhs(f, t_new, y_new)?;
        let err = h_step * (l(E1) * k1 + l(E3) * k3 + l(E4) * k4 + l(E5) * k5 + l(E6) * k6 + l(E7) * k7);
        let sc = opts.atol + opts.rtol * y.abs().max(y_new.abs());
        let ratio = err.abs() / sc;
        if !y_new.is_finite() || !ratio.is_finite() {
            // shrink until the stages are representable or the step underflows
            h = h_step * l(0.2);
            rejected += 1;
            last_rejected = true;
            continue;
        }
        let fac = if ratio == T::zero() { l(5.0) } else { (l(0.9) * ratio.powf(l(-0.2))).max(l(0.2)).min(l(5.0)) };
        if ratio <= T::one() {
            steps += 1;
            t = t_new;
            y = y_new;
            k1 = k7;
            let grow = if last_rejected { fac.min(T::one()) } else { fac };
            last_rejected = false;
            h_next = if final_step && h_step < h { h } else { h_step * grow };
            if final_step {
                break;
            }
            h = h_next;
        } else {
            rejected += 1;
            last_rejected = true;
            h = h_step * fac.min(T::one());
        }
    }
    Ok(OdeSolution { y, h_next, steps, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn solve(mut f: impl FnMut(f64, f64) -> f64, t0: f64, y0: f64, t1: f64) -> OdeSolution<f64> {
        dopri5(&mut |t, y| Ok::<_, Infallible>(f(t, y)), t0, y0, t1, None, &OdeOptions::default()).unwrap()
    }

    #[test]
    fn exponential_decay() {
        let sol = solve(|_, y| -y, 0.0, 1.0, 5.0);
        assert!((sol.y - (-5f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn lossy_cavity_particular_solution() {
        // s' = −s + 1, s(0) = 0 ⇒ s = 1 − e^{−t}
        let sol = solve(|_, s| -s + 1.0, 0.0, 0.0, 1.0);
        assert!((sol.y - (1.0 - (-1f64).exp())).abs() < 1e-10);
    }

    #[test]
    fn time_dependent_coefficients() {
        // z' = −z + α(1 + e^{−t}), z(0) = 0 ⇒ z = α(1 − (1 − t)e^{−t})
        let a = 0.5;
        let sol = solve(|t, z| -z + a * (1.0 + (-t).exp()), 0.0, 0.0, 2.0);
        assert!((sol.y - a * (1.0 + (-2f64).exp())).abs() < 1e-10);
    }

    #[test]
    fn ulp_wide_span() {
        let t0 = 1.2857213595499957f64;
        let t1 = 1.285721359549996f64;
        let sol = solve(|_, y| -y, t0, 0.5, t1);
        assert!((sol.y - 0.5 * (1.0 - (t1 - t0))).abs() < 1e-30);
    }

    #[test]
    fn zero_span_is_identity() {
        let sol = solve(|_, _| 1.0, 3.0, 0.25, 3.0);
        assert_eq!(sol.y, 0.25);
        assert_eq!(sol.steps, 0);
    }

    #[test]
    fn rhs_errors_propagate() {
        let r = dopri5(
            &mut |t: f64, _y: f64| if t > 0.5 { Err("bad") } else { Ok(1.0) },
            0.0,
            0.0,
            1.0,
            None,
            &OdeOptions::default(),
        );
        assert_eq!(r.unwrap_err(), OdeError::Rhs("bad"));
    }

    #[test]
    fn step_budget() {
        let opts = OdeOptions { max_steps: 3, ..OdeOptions::default() };
        let r = dopri5(&mut |t: f64, _y: f64| Ok::<_, Infallible>((50.0 * t).sin()), 0.0, 0.0, 10.0, None, &opts);
        assert!(matches!(r.unwrap_err(), OdeError::StepBudget { .. }));
    }

    #[test]
    fn single_precision() {
        let sol: OdeSolution<f32> =
            dopri5(&mut |_, y: f32| Ok::<_, Infallible>(-y), 0.0, 1.0, 2.0, None, &OdeOptions::default()).unwrap();
        assert!((sol.y - (-2f32).exp()).abs() < 1e-5);
    }
}
