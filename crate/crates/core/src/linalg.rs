// Copyright 2026 The alf-entropy Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrices: Kronecker products, partial traces, Hermitian
//! spectra, entropies, norms and the vectorization conventions used for
//! transfer matrices.
//!
//! Vectorization is row-major: `vec(X)[i*d + j] = X[i, j]`, so that
//! `vec(A X B) = (A ⊗ Bᵀ) vec(X)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::error::{AlfError, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Numerical tolerances shared by the validators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
    pub povm: f64,
    pub faithful: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            trace: 1e-10,
            psd: 1e-9,
            povm: 1e-8,
            faithful: 1e-12,
        }
    }
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// Pauli matrix σ_k, k = 0..3 (σ_0 = 1).
pub fn pauli(k: usize) -> ComplexMatrix {
    let e = match k {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -I, I, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => panic!("pauli index {k} out of range"),
    };
    ComplexMatrix::from_row_slice(2, 2, &e)
}

pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Left-to-right Kronecker product; the empty product is `[1]`.
pub fn tensor_all<'a, I2>(factors: I2) -> ComplexMatrix
where
    I2: IntoIterator<Item = &'a ComplexMatrix>,
{
    factors
        .into_iter()
        .fold(ComplexMatrix::from_element(1, 1, ONE), |acc, f| {
            acc.kronecker(f)
        })
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    hermiticity_defect(m) <= tol
}

pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of the Hermitian part of `m`, sorted descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let h = hermitian_part(m);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    ev
}

fn phase_fix(v: &mut ComplexVector) {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let ph = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

fn lex_desc(a: &ComplexVector, b: &ComplexVector) -> Ordering {
    const T: f64 = 1e-12;
    for (x, y) in a.iter().zip(b.iter()) {
        if (x.re - y.re).abs() > T {
            return y.re.partial_cmp(&x.re).unwrap_or(Ordering::Equal);
        }
        if (x.im - y.im).abs() > T {
            return y.im.partial_cmp(&x.im).unwrap_or(Ordering::Equal);
        }
    }
    Ordering::Equal
}

/// Eigen-decomposition of a Hermitian matrix in the canonical order:
/// eigenvalues descending, phase of each eigenvector fixed so that its first
/// nonzero entry is real positive, ties broken by descending lexicographic
/// order of the eigenvector entries.
pub fn canonical_eigen(m: &ComplexMatrix) -> (Vec<f64>, Vec<ComplexVector>) {
    let h = hermitian_part(m);
    let eig = h.symmetric_eigen();
    let mut pairs: Vec<(f64, ComplexVector)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let mut v = eig.eigenvectors.column(k).into_owned();
            phase_fix(&mut v);
            (l, v)
        })
        .collect();
    pairs.sort_by(|(la, va), (lb, vb)| {
        let scale = 1.0f64.max(la.abs()).max(lb.abs());
        if (la - lb).abs() <= 1e-12 * scale {
            lex_desc(va, vb)
        } else {
            lb.partial_cmp(la).unwrap_or(Ordering::Equal)
        }
    });
    pairs.into_iter().unzip()
}

/// Partial trace keeping the subsystems listed in `keep` (in increasing order
/// of position) of a matrix on `⊗_k C^{dims[k]}`.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.nrows() != total {
        return Err(AlfError::DimensionMismatch(format!(
            "matrix {}x{} vs subsystem dims {:?}",
            m.nrows(),
            m.ncols(),
            dims
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.iter().any(|&k| k >= dims.len()) {
        return Err(AlfError::DimensionMismatch(format!(
            "keep set {keep:?} out of range for {} subsystems",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();

    // stride of each subsystem in the full index
    let mut stride = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        stride[k] = stride[k + 1] * dims[k + 1];
    }
    let offsets = |sel: &[usize]| -> Vec<usize> {
        let n: usize = sel.iter().map(|&k| dims[k]).product();
        (0..n)
            .map(|mut idx| {
                let mut off = 0;
                for &k in sel.iter().rev() {
                    off += (idx % dims[k]) * stride[k];
                    idx /= dims[k];
                }
                off
            })
            .collect()
    };
    let ko = offsets(&kept);
    let to = offsets(&traced);
    let out = ComplexMatrix::from_fn(ko.len(), ko.len(), |r, col| {
        to.iter().map(|&t| m[(ko[r] + t, ko[col] + t)]).sum()
    });
    Ok(out)
}

/// Row-major vectorization.
pub fn vec_row_major(m: &ComplexMatrix) -> ComplexVector {
    let (r, c) = m.shape();
    ComplexVector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

pub fn unvec_row_major(v: &ComplexVector, rows: usize, cols: usize) -> ComplexMatrix {
    assert_eq!(v.len(), rows * cols, "vector length mismatch");
    ComplexMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Transfer matrix of `X ↦ Σ_k L_k X R_k`.
pub fn transfer_from_terms(terms: &[(ComplexMatrix, ComplexMatrix)]) -> ComplexMatrix {
    let mut it = terms.iter();
    let (l0, r0) = it.next().expect("at least one term");
    let mut acc = l0.kronecker(&r0.transpose());
    for (l, r) in it {
        acc += l.kronecker(&r.transpose());
    }
    acc
}

/// Transfer matrix of a linear map on M_d given as a closure.
pub fn transfer_from_fn<F>(d: usize, f: F) -> ComplexMatrix
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let mut t = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(i, j)] = ONE;
            let col = vec_row_major(&f(&e));
            t.set_column(i * d + j, &col);
        }
    }
    t
}

pub fn apply_transfer(t: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = x.shape();
    unvec_row_major(&(t * vec_row_major(x)), r, c)
}

/// Choi matrix Σ_{ij} |i⟩⟨j| ⊗ Φ(|i⟩⟨j|).
pub fn choi_from_fn<F>(d: usize, f: F) -> ComplexMatrix
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let mut choi = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(i, j)] = ONE;
            let img = f(&e);
            choi.view_mut((i * d, j * d), (d, d)).copy_from(&img);
        }
    }
    choi
}

pub fn choi_from_transfer(t: &ComplexMatrix) -> ComplexMatrix {
    let d = (t.nrows() as f64).sqrt().round() as usize;
    choi_from_fn(d, |x| apply_transfer(t, x))
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m).last().copied().unwrap_or(0.0)
}

pub fn is_psd(m: &ComplexMatrix, tol: f64) -> bool {
    is_hermitian(m, tol.max(1e-10)) && min_eigenvalue(m) >= -tol
}

/// Trace norm Tr√(X†X).
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_square() && is_hermitian(m, 1e-14 * (1.0 + m.norm())) {
        hermitian_eigenvalues(m).iter().map(|l| l.abs()).sum()
    } else {
        m.singular_values().iter().sum()
    }
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// η(x) = −x ln x with η(0) = 0.
#[inline]
pub fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Shannon entropy in nats; nonpositive entries contribute nothing.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| eta(p)).sum()
}

/// The state ρ ⊗ … ρ (n factors).
pub fn tensor_power(m: &ComplexMatrix, n: usize) -> ComplexMatrix {
    tensor_all(std::iter::repeat_n(m, n))
}

/// Hermitian, positive, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(AlfError::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !is_finite(&matrix) {
            return Err(AlfError::NonFinite);
        }
        let deviation = hermiticity_defect(&matrix);
        if deviation > tol.herm {
            return Err(AlfError::NotHermitian { deviation });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol.trace {
            return Err(AlfError::NotNormalized { trace });
        }
        let min_eigenvalue = min_eigenvalue(&matrix);
        if min_eigenvalue < -tol.psd {
            return Err(AlfError::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: identity(d).scale(1.0 / d as f64),
        }
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        let v = ComplexVector::from_iterator(p.len(), p.iter().map(|&x| c(x, 0.0)));
        Self::new(ComplexMatrix::from_diagonal(&v))
    }

    /// |ψ⟩⟨ψ| for a normalized vector.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        Self::new(psi * psi.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Eigenvalues, descending, clipped to [0, ∞).
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
            .into_iter()
            .map(|l| l.max(0.0))
            .collect()
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(self)
    }

    pub fn is_faithful(&self, tol: f64) -> bool {
        min_eigenvalue(&self.matrix) > tol
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(&rho.eigenvalues())
}

/// Entropy of a spectrum, clipping negative rounding artifacts.
pub fn spectrum_entropy(spectrum: &[f64]) -> f64 {
    shannon_entropy(spectrum)
}

/// Finite family {X_a} with Σ X_a† X_a = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(elements, Tolerances::default().povm)
    }

    pub fn with_tolerance(elements: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| AlfError::InvalidArgument("empty POVM".into()))?;
        let dim = first.nrows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for x in &elements {
            if x.shape() != (dim, dim) {
                return Err(AlfError::DimensionMismatch(format!(
                    "POVM element {}x{} in a {dim}-dimensional POVM",
                    x.nrows(),
                    x.ncols()
                )));
            }
            if !is_finite(x) {
                return Err(AlfError::NonFinite);
            }
            sum += x.adjoint() * x;
        }
        let deviation = max_abs_diff(&sum, &identity(dim));
        if deviation > tol {
            return Err(AlfError::PovmIncomplete { deviation });
        }
        Ok(Self { dim, elements })
    }

    /// The trivial POVM {1}.
    pub fn trivial(d: usize) -> Self {
        Self {
            dim: d,
            elements: vec![identity(d)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

/// Standard purification Σ_a √r_a |r_a⟩⊗|r_a⟩ in the canonical eigenbasis.
pub fn purify(rho: &DensityMatrix) -> Result<ComplexVector> {
    purify_with_tolerance(rho, Tolerances::default().faithful)
}

pub fn purify_with_tolerance(rho: &DensityMatrix, tol: f64) -> Result<ComplexVector> {
    let d = rho.dim();
    let (vals, vecs) = canonical_eigen(rho.matrix());
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= tol {
        return Err(AlfError::NotFaithful {
            min_eigenvalue: min,
        });
    }
    let mut psi = ComplexVector::zeros(d * d);
    for (r, v) in vals.iter().zip(vecs.iter()) {
        let s = r.sqrt();
        for i in 0..d {
            for j in 0..d {
                psi[i * d + j] += v[i] * v[j] * s;
            }
        }
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn scalar_tensor_identity() {
        let two = ComplexMatrix::from_element(1, 1, c(2.0, 0.0));
        let t = tensor(&two, &identity(2));
        assert_eq!(t, identity(2).scale(2.0));
    }

    #[test]
    fn bell_state_invariant_under_sigma1_sigma1() {
        let psi = ComplexVector::from_vec(vec![ONE, ZERO, ZERO, ONE]).scale(0.5f64.sqrt());
        let x = tensor(&pauli(1), &pauli(1));
        assert_abs_diff_eq!((&x * &psi - &psi).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sigma3_sigma3_diagonal() {
        let z = tensor(&pauli(3), &pauli(3));
        let diag: Vec<f64> = (0..4).map(|k| z[(k, k)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
        assert_eq!(z.iter().filter(|x| x.norm() > 0.0).count(), 4);
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)],
        );
        let tau = ComplexMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, i as f64 - j as f64));
        let pt = partial_trace(&tensor(&rho, &tau), &[2, 3], &[0]).unwrap();
        assert_abs_diff_eq!(
            max_abs_diff(&pt, &(rho.clone() * tau.trace())),
            0.0,
            epsilon = 1e-13
        );
        let pt1 = partial_trace(&tensor(&rho, &tau), &[2, 3], &[1]).unwrap();
        assert_abs_diff_eq!(
            max_abs_diff(&pt1, &(tau * rho.trace())),
            0.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn partial_trace_bell_marginal() {
        let psi = ComplexVector::from_vec(vec![ONE, ZERO, ZERO, ONE]).scale(0.5f64.sqrt());
        let pt = partial_trace(&(&psi * psi.adjoint()), &[2, 2], &[0]).unwrap();
        assert_abs_diff_eq!(
            max_abs_diff(&pt, &identity(2).scale(0.5)),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn partial_trace_middle_factor() {
        let a = pauli(1);
        let b = pauli(3) + identity(2);
        let cc = pauli(2);
        let m = tensor_all([&a, &b, &cc]);
        let pt = partial_trace(&m, &[2, 2, 2], &[0, 2]).unwrap();
        let expect = tensor(&a, &cc) * b.trace();
        assert_abs_diff_eq!(max_abs_diff(&pt, &expect), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        assert!(matches!(
            partial_trace(&identity(4), &[2, 3], &[0]),
            Err(AlfError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(
            DensityMatrix::maximally_mixed(2).entropy(),
            2f64.ln(),
            epsilon = 1e-14
        );
        let pure = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(pure.entropy(), 0.0);
        // mpmath reference
        let rho = DensityMatrix::from_diagonal(&[0.4, 0.25, 0.25, 0.1]).unwrap();
        assert_abs_diff_eq!(rho.entropy(), 1.289_921_982_609_011_9, epsilon = 1e-13);
    }

    #[test]
    fn density_rejects_invalid() {
        let not_psd = ComplexMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), ZERO, ZERO, c(-0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(not_psd),
            Err(AlfError::NotPositive { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(identity(2)),
            Err(AlfError::NotNormalized { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(pauli(2) + identity(2)),
            Err(AlfError::NotNormalized { .. })
        ));
        let nh =
            ComplexMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), ZERO, c(0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(nh),
            Err(AlfError::NotHermitian { .. })
        ));
    }

    #[test]
    fn trace_norm_examples() {
        assert_abs_diff_eq!(trace_norm(&pauli(1)), 2.0, epsilon = 1e-14);
        assert_eq!(trace_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
        let lam1 = (pauli(1) * pauli(1) * pauli(1) + pauli(2) * pauli(1) * pauli(2)).scale(0.5);
        assert_abs_diff_eq!(trace_norm(&lam1), 0.0, epsilon = 1e-15);
        let nilpotent = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert_abs_diff_eq!(trace_norm(&nilpotent), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn purify_examples() {
        let psi = purify(&DensityMatrix::maximally_mixed(2)).unwrap();
        let h = 0.5f64.sqrt();
        let expect = [h, 0.0, 0.0, h];
        for (z, e) in psi.iter().zip(expect) {
            assert_abs_diff_eq!(z.re, e, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }
        let r = 0.3;
        let psi = purify(&DensityMatrix::from_diagonal(&[r, 1.0 - r]).unwrap()).unwrap();
        // canonical order is descending, but the vector is basis-independent
        assert_abs_diff_eq!(psi[0].re, r.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(psi[3].re, (1.0 - r).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(psi[1].norm() + psi[2].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn purify_rejects_pure_state() {
        let rho = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(purify(&rho), Err(AlfError::NotFaithful { .. })));
    }

    #[test]
    fn canonical_eigen_order() {
        let (vals, vecs) = canonical_eigen(&identity(3));
        assert_eq!(vals, vec![1.0, 1.0, 1.0]);
        for (k, v) in vecs.iter().enumerate() {
            assert_abs_diff_eq!(v[k].re, 1.0, epsilon = 1e-15);
        }
        let (vals, vecs) = canonical_eigen(&pauli(1));
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-14);
        assert!(vecs[0][0].re > 0.0 && vecs[0][0].im.abs() < 1e-15);
    }

    #[test]
    fn transfer_conventions() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64));
        let b = ComplexMatrix::from_fn(2, 2, |i, j| c(j as f64 - i as f64, 0.5));
        let x = ComplexMatrix::from_fn(2, 2, |i, j| c((i * 2 + j) as f64, 1.0));
        let t = transfer_from_terms(&[(a.clone(), b.clone())]);
        assert_abs_diff_eq!(
            max_abs_diff(&apply_transfer(&t, &x), &(&a * &x * &b)),
            0.0,
            epsilon = 1e-13
        );
        let tf = transfer_from_fn(2, |y| &a * y * &b);
        assert_abs_diff_eq!(max_abs_diff(&t, &tf), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn choi_of_identity_is_unnormalized_bell() {
        let choi = choi_from_fn(2, |x| x.clone());
        let psi = ComplexVector::from_vec(vec![ONE, ZERO, ZERO, ONE]);
        assert_abs_diff_eq!(
            max_abs_diff(&choi, &(&psi * psi.adjoint())),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::new(vec![identity(2)]).is_ok());
        assert!(matches!(
            Povm::new(vec![identity(2).scale(0.5)]),
            Err(AlfError::PovmIncomplete { .. })
        ));
    }
}
