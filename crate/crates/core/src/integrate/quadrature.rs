// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Simpson quadrature with interval halving.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct SimpsonOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    /// Maximum number of halvings below the initial interval.
    pub max_depth: u32,
    /// Halvings always performed, so that short-period integrands are not
    /// aliased by the first three nodes.
    pub min_depth: u32,
    pub max_evals: usize,
}

impl<T: Real> Default for SimpsonOptions<T> {
    fn default() -> Self {
        SimpsonOptions {
            abs_tol: T::quad_tol(),
            rel_tol: T::quad_tol(),
            max_depth: 60,
            min_depth: 2,
            max_evals: 2_000_000,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum QuadError<E> {
    #[error("integrand: {0}")]
    Integrand(E),
    #[error("tolerance not reached on [{a}, {b}] within depth budget")]
    DepthExceeded { a: f64, b: f64 },
    #[error("evaluation budget exhausted")]
    EvalBudget,
}

struct Simpson<'f, T, E, F: FnMut(T) -> Result<T, E>> {
    f: &'f mut F,
    opts: SimpsonOptions<T>,
    evals: usize,
}

impl<T: Real, E, F: FnMut(T) -> Result<T, E>> Simpson<'_, T, E, F> {
    fn eval(&mut self, x: T) -> Result<T, QuadError<E>> {
        self.evals += 1;
        if self.evals > self.opts.max_evals {
            return Err(QuadError::EvalBudget);
        }
        (self.f)(x).map_err(QuadError::Integrand)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: T,
        fa: T,
        m: T,
        fm: T,
        b: T,
        fb: T,
        whole: T,
        eps: T,
        depth: u32,
    ) -> Result<T, QuadError<E>> {
        let two = T::lit(2.0);
        let lm = (a + m) / two;
        let rm = (m + b) / two;
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let twelfth = (b - a) / T::lit(12.0);
        let four = T::lit(4.0);
        let left = twelfth * (fa + four * flm + fm);
        let right = twelfth * (fm + four * frm + fb);
        let delta = left + right - whole;
        let roundoff = T::lit(64.0) * T::epsilon() * (left.abs() + right.abs());
        let level = self.opts.max_depth - depth;
        if level >= self.opts.min_depth && (delta.abs() <= T::lit(15.0) * eps || delta.abs() <= roundoff) {
            return Ok(left + right + delta / T::lit(15.0));
        }
        let unsplittable = lm <= a || rm >= b;
        if unsplittable && level < self.opts.min_depth {
            // an interval a few ulps wide cannot take the forced halvings
            return Ok(left + right + delta / T::lit(15.0));
        }
        if depth == 0 || unsplittable {
            return Err(QuadError::DepthExceeded { a: a.to_f64_lossy(), b: b.to_f64_lossy() });
        }
        let half = eps / two;
        let l = self.refine(a, fa, lm, flm, m, fm, left, half, depth - 1)?;
        let r = self.refine(m, fm, rm, frm, b, fb, right, half, depth - 1)?;
        Ok(l + r)
    }
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive_simpson<T, E, F>(f: &mut F, a: T, b: T, opts: &SimpsonOptions<T>) -> Result<T, QuadError<E>>
where
    T: Real,
    F: FnMut(T) -> Result<T, E>,
{
    if a == b {
        return Ok(T::zero());
    }
    let mut s = Simpson { f, opts: *opts, evals: 0 };
    let m = (a + b) / T::lit(2.0);
    let fa = s.eval(a)?;
    let fm = s.eval(m)?;
    let fb = s.eval(b)?;
    let whole = (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb);
    let eps = opts.abs_tol.max(opts.rel_tol * whole.abs());
    s.refine(a, fa, m, fm, b, fb, whole, eps, opts.max_depth)
}
