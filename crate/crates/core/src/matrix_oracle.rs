//! Brute-force field operators on a truncated Fock basis.
//!
//! Expectation values are taken as `sum_s psi_s^dagger O psi_s`, with `psi_s`
//! the field part of each atomic configuration. The basis is padded beyond
//! the state's cutoff so that products such as `a^2 a+^2` are exact on the
//! populated levels.

use nalgebra::{DMatrix, DVector};

use crate::fock_oracle::StateVector;
use crate::C64;

const PADDING: usize = 6;

/// Annihilation operator on `dim` Fock levels.
pub fn annihilation(dim: usize) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(dim, dim);
    for m in 1..dim {
        a[(m - 1, m)] = C64::from((m as f64).sqrt());
    }
    a
}

pub fn number(dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::from(i as f64)
        } else {
            C64::from(0.0)
        }
    })
}

/// `(X1, X2)`.
pub fn quadratures(dim: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let a = annihilation(dim);
    let ad = a.adjoint();
    let x1 = (&a + &ad) * C64::from(0.5);
    let x2 = (&a - &ad) * C64::new(0.0, -0.5);
    (x1, x2)
}

/// `(Y1, Y2)`.
pub fn squared_amplitudes(dim: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let a = annihilation(dim);
    let a2 = &a * &a;
    let ad2 = a2.adjoint();
    let y1 = (&a2 + &ad2) * C64::from(0.5);
    let y2 = (&a2 - &ad2) * C64::new(0.0, -0.5);
    (y1, y2)
}

/// Largest entry of `[Y1, Y2] - i (2 n + 1)` on the lowest `dim - 4` levels.
pub fn commutator_deviation(dim: usize) -> f64 {
    let (y1, y2) = squared_amplitudes(dim);
    let comm = &y1 * &y2 - &y2 * &y1;
    let expect = (number(dim) * C64::from(2.0) + DMatrix::identity(dim, dim)) * C64::new(0.0, 1.0);
    let diff = comm - expect;
    let keep = dim.saturating_sub(4);
    let mut worst: f64 = 0.0;
    for i in 0..keep {
        for j in 0..keep {
            worst = worst.max(diff[(i, j)].norm());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleVariances {
    pub var_x1: f64,
    pub var_x2: f64,
    pub var_y1: f64,
    pub var_y2: f64,
    pub mean_n: f64,
}

fn padded_components(state: &StateVector, dim: usize) -> Vec<DVector<C64>> {
    state
        .field_components()
        .iter()
        .map(|comp| {
            let mut v = DVector::zeros(dim);
            for (m, c) in comp.iter().enumerate() {
                v[m] = *c;
            }
            v
        })
        .collect()
}

fn expectation(psi: &[DVector<C64>], op: &DMatrix<C64>) -> C64 {
    psi.iter().map(|v| v.dotc(&(op * v))).sum()
}

/// Variances of `X1, X2, Y1, Y2` from explicit operator matrices.
pub fn variances(state: &StateVector) -> OracleVariances {
    let dim = state.blocks.len() + PADDING;
    let psi = padded_components(state, dim);
    let (x1, x2) = quadratures(dim);
    let (y1, y2) = squared_amplitudes(dim);
    let var = |op: &DMatrix<C64>| {
        let mean = expectation(&psi, op).re;
        expectation(&psi, &(op * op)).re - mean * mean
    };
    OracleVariances {
        var_x1: var(&x1),
        var_x2: var(&x2),
        var_y1: var(&y1),
        var_y2: var(&y2),
        mean_n: expectation(&psi, &number(dim)).re,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_is_two_n_plus_one() {
        assert!(commutator_deviation(30) < 1e-10);
    }

    #[test]
    fn quadrature_commutator() {
        let (x1, x2) = quadratures(12);
        let c = &x1 * &x2 - &x2 * &x1;
        for i in 0..11 {
            assert!((c[(i, i)] - C64::new(0.0, 0.5)).norm() < 1e-14);
        }
    }
}
