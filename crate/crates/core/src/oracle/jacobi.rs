// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

//! Cyclic Jacobi eigenvalue iteration for small dense symmetric and Hermitian
//! matrices.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
#[error("Jacobi iteration did not converge in {sweeps} sweeps (off-diagonal norm {off})")]
pub struct NonConvergence {
    pub sweeps: usize,
    pub off: f64,
}

pub const MAX_SWEEPS: usize = 200;

fn off_diagonal<T: Real, const N: usize>(a: &[[T; N]; N]) -> (T, T) {
    let mut off = T::zero();
    let mut total = T::zero();
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            total = total + v * v;
            if i != j {
                off = off + v * v;
            }
        }
    }
    (off.sqrt(), total.sqrt())
}

/// Eigenvalues of a real symmetric matrix, sorted descending.
///
/// Only the upper triangle needs to be meaningful; the matrix is symmetrized
/// before iterating.
pub fn symmetric_eigenvalues<T: Real, const N: usize>(
    mut a: [[T; N]; N],
    max_sweeps: usize,
) -> Result<[T; N], NonConvergence> {
    #[allow(clippy::needless_range_loop)]
    for i in 0..N {
        for j in 0..i {
            a[i][j] = a[j][i];
        }
    }
    let two = T::lit(2.0);
    let mut sweeps = 0;
    loop {
        let (off, total) = off_diagonal(&a);
        if off <= T::epsilon() * total || off == T::zero() {
            break;
        }
        if sweeps == max_sweeps {
            return Err(NonConvergence { sweeps, off: off.to_f64_lossy() });
        }
        sweeps += 1;
        for p in 0..N {
            for q in p + 1..N {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(T::one()));
                let c = T::one() / t.hypot(T::one());
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (rp, rq) = (a[p], a[q]);
                for k in 0..N {
                    a[p][k] = c * rp[k] - s * rq[k];
                    a[q][k] = s * rp[k] + c * rq[k];
                }
                a[p][q] = T::zero();
                a[q][p] = T::zero();
            }
        }
    }
    let mut eig: [T; N] = std::array::from_fn(|i| a[i][i]);
    eig.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(eig)
}

/// Eigenvalues of a 4×4 Hermitian matrix, sorted descending.
///
/// Works on the real symmetric embedding `[[A, −B], [B, A]]` of `A + iB`,
/// whose spectrum is that of the Hermitian matrix with every eigenvalue
/// doubled.
pub fn hermitian4_eigenvalues<T: Real>(h: &[[Complex<T>; 4]; 4], max_sweeps: usize) -> Result<[T; 4], NonConvergence> {
    let mut m = [[T::zero(); 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            // average with the conjugate transpose so round-off asymmetry cannot leak in
            let v = (h[i][j] + h[j][i].conj()) * T::lit(0.5);
            m[i][j] = v.re;
            m[i + 4][j + 4] = v.re;
            m[i][j + 4] = -v.im;
            m[i + 4][j] = v.im;
        }
    }
    let eig = symmetric_eigenvalues(m, max_sweeps)?;
    Ok([eig[0], eig[2], eig[4], eig[6]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let a = [[3.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]];
        assert_eq!(symmetric_eigenvalues(a, MAX_SWEEPS).unwrap(), [3.0, 2.0, -1.0]);
    }

    #[test]
    fn two_by_two() {
        // eigenvalues of [[2, 1], [1, 2]] are 3 and 1
        let e = symmetric_eigenvalues([[2.0f64, 1.0], [1.0, 2.0]], MAX_SWEEPS).unwrap();
        assert!((e[0] - 3.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tridiagonal_closed_form() {
        // eigenvalues of tridiag(-1, 2, -1) of size n are 2 - 2cos(kπ/(n+1))
        const N: usize = 6;
        let mut a = [[0.0f64; N]; N];
        for i in 0..N {
            a[i][i] = 2.0;
            if i + 1 < N {
                a[i][i + 1] = -1.0;
                a[i + 1][i] = -1.0;
            }
        }
        let got = symmetric_eigenvalues(a, MAX_SWEEPS).unwrap();
        let mut want: Vec<f64> =
            (1..=N).map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (N as f64 + 1.0)).cos()).collect();
        want.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-13);
        }
    }

    #[test]
    fn hermitian_pauli_y() {
        let z = Complex::new(0.0f64, 0.0);
        let mut h = [[z; 4]; 4];
        h[0][1] = Complex::new(0.0, -1.0);
        h[1][0] = Complex::new(0.0, 1.0);
        h[2][2] = Complex::new(0.5, 0.0);
        h[3][3] = Complex::new(-2.0, 0.0);
        let e = hermitian4_eigenvalues(&h, MAX_SWEEPS).unwrap();
        let want = [1.0, 0.5, -1.0, -2.0];
        for (g, w) in e.iter().zip(want) {
            assert!((g - w).abs() < 1e-14, "{e:?}");
        }
    }

    #[test]
    fn budget_reported() {
        let a = [[1.0f64, 0.5, 0.2], [0.5, 2.0, 0.3], [0.2, 0.3, 3.0]];
        assert!(matches!(symmetric_eigenvalues(a, 0), Err(NonConvergence { sweeps: 0, .. })));
    }

    #[test]
    fn single_precision() {
        let e = symmetric_eigenvalues([[2.0f32, 1.0], [1.0, 2.0]], MAX_SWEEPS).unwrap();
        assert!((e[0] - 3.0).abs() < 1e-6 && (e[1] - 1.0).abs() < 1e-6);
    }
}
