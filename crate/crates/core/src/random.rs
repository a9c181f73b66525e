// Copyright 2026 The alf-entropy Authors
// SPDX-License-Identifier: Apache-2.0

//! Random instances for tests and probe searches.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, identity, ComplexMatrix, ComplexVector, DensityMatrix, Povm};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Ginibre matrix with standard normal entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(normal(rng), normal(rng)))
}

pub fn random_state_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| c(normal(rng), normal(rng)));
    let n = v.norm();
    v.unscale(n)
}

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        let z = r[(k, k)];
        let ph = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            c(1.0, 0.0)
        };
        let mut col = q.column_mut(k);
        col *= ph;
    }
    q
}

/// Random full-rank state from the Ginibre ensemble, mixed with a little
/// identity so that it is comfortably faithful.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(d, d, rng);
    let m = &g * g.adjoint() + identity(d).scale(0.05);
    let t = m.trace().re;
    let m = m.unscale(t);
    DensityMatrix::new((&m + m.adjoint()).scale(0.5)).expect("Ginibre state is valid")
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Random POVM with `k` elements: X_a = A_a S^{-1/2}, S = Σ A_a†A_a.
pub fn random_povm<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Povm {
    let raw: Vec<ComplexMatrix> = (0..k).map(|_| ginibre(d, d, rng)).collect();
    let mut s = ComplexMatrix::zeros(d, d);
    for a in &raw {
        s += a.adjoint() * a;
    }
    let eig = ((&s + s.adjoint()).scale(0.5)).symmetric_eigen();
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| c(1.0 / l.sqrt(), 0.0)));
    let s_inv_half = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    Povm::new(raw.iter().map(|a| a * &s_inv_half).collect()).expect("normalized POVM")
}

/// Random probability vector bounded away from zero.
pub fn random_probability<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Random column-stochastic matrix, `t[(i, j)] = P(next = i | current = j)`.
pub fn random_column_stochastic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(n, n);
    for j in 0..n {
        let col = random_probability(n, rng);
        for i in 0..n {
            t[(i, j)] = col[i];
        }
    }
    t
}
