// Copyright 2026 The alf-entropy Authors
// SPDX-License-Identifier: Apache-2.0

//! Collisional model: a d-level system collides with successive sites of a
//! classical chain, site symbol `k` applying `φ_k[X] = U_k† X U_k`.
//!
//! For a word `w = (w_1, …, w_n)` the composed automorphism is
//! `φ_{w_1}∘…∘φ_{w_n}[X] = V† X V` with `V = U_{w_n}⋯U_{w_1}`.
//!
//! Index conventions:
//! - coarse-grained matrices are indexed by `(a_0, …, a_n)` with `a_0` most
//!   significant;
//! - the factorized state is stored as (system slot) ⊗ (system slot) ⊗
//!   (T_n output slots 1..n) ⊗ (purification partners 1..n).

use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, check_words, AlfError, Result};
use crate::linalg::{
    c, canonical_eigen, hermitian_eigenvalues, hermitian_part, identity, max_abs_diff,
    partial_trace, pauli, shannon_entropy, spectral_norm, tensor_all, unitarity_defect,
    vec_row_major, ComplexMatrix, DensityMatrix, Povm, Tolerances, ONE, ZERO,
};
use crate::source::{word_from_index, StationarySource};

const TOL_UNITARY: f64 = 1e-10;
/// Words per work unit in parallel sums. Fixed so that results do not
/// depend on the thread count.
const CHUNK: usize = 256;

/// Sum of `f(range)` over fixed chunks of `0..count`, merged by a pairwise
/// tree in chunk order.
pub(crate) fn ordered_sum<F>(count: usize, zero: ComplexMatrix, f: F) -> ComplexMatrix
where
    F: Fn(Range<usize>) -> ComplexMatrix + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let mut parts: Vec<ComplexMatrix> = (0..chunks)
        .into_par_iter()
        .map(|k| f(k * CHUNK..((k + 1) * CHUNK).min(count)))
        .collect();
    if parts.is_empty() {
        return zero;
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop().unwrap_or(zero)
}

pub fn pauli_unitaries() -> Vec<ComplexMatrix> {
    (0..4).map(pauli).collect()
}

/// Discrete Weyl operators `U_{a,b} = Σ_k ω^{kb} |a+k⟩⟨k|`, listed with
/// index `a·d + b`.
pub fn weyl_unitaries(d: usize) -> Result<Vec<ComplexMatrix>> {
    if d < 2 {
        return Err(AlfError::InvalidArgument(format!(
            "Weyl operators need d >= 2, got {d}"
        )));
    }
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut u = ComplexMatrix::zeros(d, d);
            for k in 0..d {
                let ph = omega * ((k * b) % d) as f64;
                u[((a + k) % d, k)] = c(ph.cos(), ph.sin());
            }
            out.push(u);
        }
    }
    Ok(out)
}

/// System dimension, collision unitaries, classical source and the system
/// reference state.
#[derive(Clone, Debug)]
pub struct CollisionModel {
    d: usize,
    unitaries: Vec<ComplexMatrix>,
    source: StationarySource,
    system_state: DensityMatrix,
}

impl CollisionModel {
    pub fn new(
        unitaries: Vec<ComplexMatrix>,
        source: StationarySource,
        system_state: DensityMatrix,
    ) -> Result<Self> {
        let d = system_state.dim();
        if unitaries.len() != source.alphabet_size() {
            return Err(AlfError::DimensionMismatch(format!(
                "{} unitaries for an alphabet of size {}",
                unitaries.len(),
                source.alphabet_size()
            )));
        }
        for (index, u) in unitaries.iter().enumerate() {
            if u.shape() != (d, d) {
                return Err(AlfError::DimensionMismatch(format!(
                    "unitary {index} is {}x{}, system dimension {d}",
                    u.nrows(),
                    u.ncols()
                )));
            }
            let deviation = unitarity_defect(u);
            if deviation > TOL_UNITARY {
                return Err(AlfError::NotUnitary { index, deviation });
            }
        }
        Ok(Self {
            d,
            unitaries,
            source,
            system_state,
        })
    }

    /// Model with the maximally mixed reference state.
    pub fn with_maximally_mixed(
        unitaries: Vec<ComplexMatrix>,
        source: StationarySource,
    ) -> Result<Self> {
        let d = unitaries.first().map(|u| u.nrows()).unwrap_or(1);
        Self::new(unitaries, source, DensityMatrix::maximally_mixed(d))
    }

    /// Qubit model with φ_k = σ_k · σ_k over a four-symbol source.
    pub fn pauli(source: StationarySource) -> Result<Self> {
        Self::with_maximally_mixed(pauli_unitaries(), source)
    }

    pub fn weyl(d: usize, source: StationarySource) -> Result<Self> {
        Self::with_maximally_mixed(weyl_unitaries(d)?, source)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn source(&self) -> &StationarySource {
        &self.source
    }

    pub fn system_state(&self) -> &DensityMatrix {
        &self.system_state
    }

    pub fn alphabet_size(&self) -> usize {
        self.unitaries.len()
    }

    /// `V = U_{w_n}⋯U_{w_1}`.
    pub fn word_unitary(&self, word: &[usize]) -> ComplexMatrix {
        word.iter()
            .fold(identity(self.d), |acc, &k| &self.unitaries[k] * acc)
    }

    /// `O_{jk} = Tr(ρ_S U_j† U_k)`.
    pub fn overlap_matrix(&self) -> ComplexMatrix {
        let rho = self.system_state.matrix();
        let n = self.alphabet_size();
        ComplexMatrix::from_fn(n, n, |j, k| {
            (rho * self.unitaries[j].adjoint() * &self.unitaries[k]).trace()
        })
    }

    /// True when `Tr(ρ_S U_j†U_k) = δ_jk`, which makes the purified
    /// collision states orthonormal.
    pub fn is_trace_orthogonal(&self, tol: f64) -> bool {
        let n = self.alphabet_size();
        max_abs_diff(&self.overlap_matrix(), &identity(n)) <= tol
    }

    fn positive_words(&self, n: usize) -> Result<Vec<(usize, f64)>> {
        check_words(self.alphabet_size(), n)?;
        Ok(self
            .source
            .word_probabilities(n)?
            .into_iter()
            .enumerate()
            .filter(|(_, p)| *p > 0.0)
            .collect())
    }

    fn check_square(&self, x: &ComplexMatrix) -> Result<()> {
        if x.shape() != (self.d, self.d) {
            return Err(AlfError::DimensionMismatch(format!(
                "operator is {}x{}, system dimension {}",
                x.nrows(),
                x.ncols(),
                self.d
            )));
        }
        Ok(())
    }
}

/// Heisenberg-picture reduced map `Λ_n[X] = Σ_w p_w V_w† X V_w`.
pub fn reduced_map_apply(
    model: &CollisionModel,
    n: usize,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    reduced_map_impl(model, n, x, false)
}

/// Schrödinger-picture dual `Λ_n^‡[X] = Σ_w p_w V_w X V_w†`.
pub fn reduced_map_apply_dual(
    model: &CollisionModel,
    n: usize,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    reduced_map_impl(model, n, x, true)
}

fn reduced_map_impl(
    model: &CollisionModel,
    n: usize,
    x: &ComplexMatrix,
    dual: bool,
) -> Result<ComplexMatrix> {
    model.check_square(x)?;
    let words = model.positive_words(n)?;
    let d = model.d;
    let dd = model.alphabet_size();
    Ok(ordered_sum(
        words.len(),
        ComplexMatrix::zeros(d, d),
        |range| {
            let mut acc = ComplexMatrix::zeros(d, d);
            for &(idx, p) in &words[range] {
                let v = model.word_unitary(&word_from_index(idx, dd, n));
                let term = if dual {
                    &v * x * v.adjoint()
                } else {
                    v.adjoint() * x * &v
                };
                acc += term.scale(p);
            }
            acc
        },
    ))
}

fn sqrt_psd(rho: &DensityMatrix) -> ComplexMatrix {
    let eig = hermitian_part(rho.matrix()).symmetric_eigen();
    let s = eig.eigenvalues.map(|l| c(l.max(0.0).sqrt(), 0.0));
    &eig.eigenvectors * ComplexMatrix::from_diagonal(&s) * eig.eigenvectors.adjoint()
}

/// `A A†` with the rows of the result computed in parallel blocks.
fn gram_rows(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.nrows();
    let ad = a.adjoint();
    const ROWS: usize = 64;
    let blocks: Vec<ComplexMatrix> = (0..n.div_ceil(ROWS))
        .into_par_iter()
        .map(|b| {
            let lo = b * ROWS;
            let hi = (lo + ROWS).min(n);
            a.rows(lo, hi - lo) * &ad
        })
        .collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for (b, blk) in blocks.iter().enumerate() {
        out.rows_mut(b * ROWS, blk.nrows()).copy_from(blk);
    }
    out
}

/// Coarse-grained state ρ_S[𝒳^(n+1)] by direct enumeration: entry `(a, b)`
/// is `Σ_w p_w Tr(ρ_S K_b† K_a)` with
/// `K_a = X_{a_n} U_{w_n} X_{a_{n−1}} ⋯ U_{w_1} X_{a_0}`.
pub fn coarse_grained_bruteforce(
    model: &CollisionModel,
    povm: &Povm,
    n: usize,
) -> Result<DensityMatrix> {
    let d = model.d;
    if povm.dim() != d {
        return Err(AlfError::DimensionMismatch(format!(
            "POVM acts on dimension {}, system dimension {d}",
            povm.dim()
        )));
    }
    let m = povm.len();
    let dim = (m as u128).checked_pow(n as u32 + 1).unwrap_or(u128::MAX);
    check_dim("coarse-grained dimension", dim)?;
    let dim = dim as usize;
    let words = model.positive_words(n)?;
    let sq = sqrt_psd(model.system_state());
    let xs = povm.elements();
    let dd = model.alphabet_size();

    // columns of the factor matrix: d² per word
    let block_words = (4096 / (d * d)).max(1);
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for block in words.chunks(block_words) {
        let cols: Vec<ComplexMatrix> = block
            .par_iter()
            .map(|&(idx, p)| {
                let word = word_from_index(idx, dd, n);
                let mut ks: Vec<ComplexMatrix> = xs.iter().map(|x| x * &sq).collect();
                for &k in &word {
                    let u = &model.unitaries[k];
                    let mut next = Vec::with_capacity(ks.len() * m);
                    for kk in &ks {
                        let uk = u * kk;
                        next.extend(xs.iter().map(|x| x * &uk));
                    }
                    ks = next;
                }
                let s = p.sqrt();
                ComplexMatrix::from_fn(dim, d * d, |row, col| ks[row][(col / d, col % d)] * s)
            })
            .collect();
        let mut factor = ComplexMatrix::zeros(dim, cols.len() * d * d);
        for (k, blk) in cols.iter().enumerate() {
            factor.columns_mut(k * d * d, d * d).copy_from(blk);
        }
        rho += gram_rows(&factor);
    }
    DensityMatrix::new(hermitian_part(&rho))
}

/// The POVM `F_{a,a'} = √r_a |r_a⟩⟨r_{a'}|` built on the canonical
/// eigenbasis of a faithful state, element index `a·d + a'`.
pub fn special_povm(rho: &DensityMatrix) -> Result<Povm> {
    let (vals, vecs) = canonical_eigen(rho.matrix());
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= Tolerances::default().faithful {
        return Err(AlfError::NotFaithful {
            min_eigenvalue: min,
        });
    }
    let mut elements = Vec::with_capacity(vals.len() * vals.len());
    for (ra, va) in vals.iter().zip(&vecs) {
        for vb in &vecs {
            elements.push((va * vb.adjoint()).scale(ra.sqrt()));
        }
    }
    Povm::new(elements)
}

/// `T_n = Σ_w p_w φ_{w_1} ⊗ … ⊗ φ_{w_n}` acting on `M_d^{⊗n}`.
#[derive(Clone, Debug)]
pub struct TnMap {
    n: usize,
    d: usize,
    unitaries: Vec<ComplexMatrix>,
    terms: Vec<(Vec<usize>, f64)>,
}

pub fn build_tn(model: &CollisionModel, n: usize) -> Result<TnMap> {
    let dd = model.alphabet_size();
    let terms = model
        .positive_words(n)?
        .into_iter()
        .map(|(idx, p)| (word_from_index(idx, dd, n), p))
        .collect::<Vec<_>>();
    let total: f64 = terms.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(AlfError::InvariantViolation(format!(
            "T_n weights sum to {total}"
        )));
    }
    Ok(TnMap {
        n,
        d: model.d,
        unitaries: model.unitaries.clone(),
        terms,
    })
}

impl TnMap {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Dimension of `C^{d^n}`.
    pub fn space_dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    pub fn terms(&self) -> &[(Vec<usize>, f64)] {
        &self.terms
    }

    fn word_tensor(&self, word: &[usize]) -> ComplexMatrix {
        tensor_all(word.iter().map(|&k| &self.unitaries[k]))
    }

    fn apply_impl(&self, x: &ComplexMatrix, dual: bool) -> Result<ComplexMatrix> {
        let dim = self.space_dim();
        check_dim("T_n space dimension", dim as u128)?;
        if x.shape() != (dim, dim) {
            return Err(AlfError::DimensionMismatch(format!(
                "operator is {}x{}, T_{} acts on dimension {dim}",
                x.nrows(),
                x.ncols(),
                self.n
            )));
        }
        Ok(ordered_sum(
            self.terms.len(),
            ComplexMatrix::zeros(dim, dim),
            |range| {
                let mut acc = ComplexMatrix::zeros(dim, dim);
                for (word, p) in &self.terms[range] {
                    let w = self.word_tensor(word);
                    let term = if dual {
                        &w * x * w.adjoint()
                    } else {
                        w.adjoint() * x * &w
                    };
                    acc += term.scale(*p);
                }
                acc
            },
        ))
    }

    /// Heisenberg action on `M_d^{⊗n}`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.apply_impl(x, false)
    }

    /// Schrödinger dual `T_n^‡`.
    pub fn apply_dual(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.apply_impl(x, true)
    }

    /// Transfer matrix on row-major vectorized `M_{d^n}`, i.e. with the
    /// row slots grouped before the column slots.
    pub fn transfer_matrix(&self) -> Result<ComplexMatrix> {
        let dim = self.space_dim();
        check_dim("T_n transfer dimension", (dim * dim) as u128)?;
        let n2 = dim * dim;
        Ok(ordered_sum(
            self.terms.len(),
            ComplexMatrix::zeros(n2, n2),
            |range| {
                let mut acc = ComplexMatrix::zeros(n2, n2);
                for (word, p) in &self.terms[range] {
                    let w = self.word_tensor(word);
                    acc += w.adjoint().kronecker(&w.transpose()).scale(*p);
                }
                acc
            },
        ))
    }

    /// One-slot marginal `X ↦ Tr_{others}(T_n[1⊗…⊗X⊗…⊗1]) / d^{n−1}` as a
    /// `d²×d²` transfer matrix.
    pub fn marginal_transfer(&self, slot: usize) -> Result<ComplexMatrix> {
        if slot >= self.n {
            return Err(AlfError::InvalidArgument(format!(
                "slot {slot} of T_{}",
                self.n
            )));
        }
        let d = self.d;
        let dims = vec![d; self.n];
        let norm = (d as f64).powi(self.n as i32 - 1);
        let mut t = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = ComplexMatrix::zeros(d, d);
                e[(i, j)] = ONE;
                let factors: Vec<ComplexMatrix> = (0..self.n)
                    .map(|k| if k == slot { e.clone() } else { identity(d) })
                    .collect();
                let y = partial_trace(&self.apply(&tensor_all(&factors))?, &dims, &[slot])?;
                t.set_column(i * d + j, &vec_row_major(&y.unscale(norm)));
            }
        }
        Ok(t)
    }
}

/// Transfer matrix (row slots grouped before column slots) of
/// `Φ_1 ⊗ … ⊗ Φ_n` from the one-slot transfer matrices.
pub fn tensor_transfer(d: usize, factors: &[ComplexMatrix]) -> ComplexMatrix {
    let n = factors.len();
    let dim = d.pow(n as u32);
    let n2 = dim * dim;
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut v = vec![0; n];
        for k in (0..n).rev() {
            v[k] = idx % d;
            idx /= d;
        }
        v
    };
    let rows: Vec<Vec<usize>> = (0..dim).map(digits).collect();
    ComplexMatrix::from_fn(n2, n2, |out, inp| {
        let (ro, co) = (&rows[out / dim], &rows[out % dim]);
        let (ri, ci) = (&rows[inp / dim], &rows[inp % dim]);
        let mut z = ONE;
        for k in 0..n {
            z *= factors[k][(ro[k] * d + co[k], ri[k] * d + ci[k])];
            if z == ZERO {
                break;
            }
        }
        z
    })
}

/// Outcome of the quantum-regression factorization test.
#[derive(Clone, Debug, Serialize)]
pub struct QrReport {
    pub holds: bool,
    pub deviation: f64,
    /// One-slot transfer matrices, present only when the test holds.
    #[serde(skip)]
    pub factors: Option<Vec<ComplexMatrix>>,
}

/// Compares `T_n` with the tensor product of its one-slot marginals in
/// relative spectral norm.
pub fn qr_factorization_test(model: &CollisionModel, n: usize, tol: f64) -> Result<QrReport> {
    if n < 2 {
        return Err(AlfError::InvalidArgument(format!(
            "QR test needs n >= 2, got {n}"
        )));
    }
    let tn = build_tn(model, n)?;
    let full = tn.transfer_matrix()?;
    let factors: Vec<ComplexMatrix> = (0..n)
        .map(|k| tn.marginal_transfer(k))
        .collect::<Result<_>>()?;
    let product = tensor_transfer(model.d, &factors);
    let deviation = spectral_norm(&(&full - &product)) / spectral_norm(&full);
    let holds = deviation <= tol;
    Ok(QrReport {
        holds,
        deviation,
        factors: holds.then_some(factors),
    })
}

/// How the spectrum of the T_n-evolved purification is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChainSpectrumMethod {
    /// Pick the cheapest exact route.
    Auto,
    /// Word probabilities; exact when the purified collision states are
    /// orthonormal.
    Probabilities,
    /// Eigenvalues of `√P G √P`, `G_{wv} = Π_k Tr(ρ_S U_{w_k}† U_{v_k})`.
    WordGram,
    /// Diagonalize the dense `d^{2n}` state.
    Dense,
}

/// Spectrum of the factorized coarse-grained state
/// `ρ_S ⊗ ρ_S ⊗ (T_n^‡ ⊗ id)[|√ρ_S^{⊗n}⟩⟨√ρ_S^{⊗n}|]`.
#[derive(Clone, Debug, Serialize)]
pub struct FactorizedSpectrum {
    pub n: usize,
    pub d: usize,
    /// Eigenvalues of ρ_S, descending.
    pub system_spectrum: Vec<f64>,
    /// Eigenvalues of the chain part, descending, length `d^{2n}` when that
    /// fits in memory (otherwise the nonzero part).
    pub chain_spectrum: Vec<f64>,
    pub method: ChainSpectrumMethod,
}

impl FactorizedSpectrum {
    /// Entropy of the T_n-evolved purification.
    pub fn chain_entropy(&self) -> f64 {
        shannon_entropy(&self.chain_spectrum)
    }

    /// Total entropy `2 S(ρ_S) + S(chain part)`.
    pub fn entropy(&self) -> f64 {
        2.0 * shannon_entropy(&self.system_spectrum) + self.chain_entropy()
    }

    /// Full spectrum, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut out =
            Vec::with_capacity(self.system_spectrum.len().pow(2) * self.chain_spectrum.len());
        for a in &self.system_spectrum {
            for b in &self.system_spectrum {
                out.extend(self.chain_spectrum.iter().map(|x| a * b * x));
            }
        }
        out.sort_by(|x, y| y.total_cmp(x));
        out
    }
}

fn purification_factor(model: &CollisionModel) -> Result<ComplexMatrix> {
    let rho = model.system_state();
    let (vals, vecs) = canonical_eigen(rho.matrix());
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= Tolerances::default().faithful {
        return Err(AlfError::NotFaithful {
            min_eigenvalue: min,
        });
    }
    let d = model.d;
    let mut m = ComplexMatrix::zeros(d, d);
    for (r, v) in vals.iter().zip(&vecs) {
        m += (v * v.transpose()).scale(r.sqrt());
    }
    Ok(m)
}

/// Columns `√p_w |ψ_w⟩`, `|ψ_w⟩ = (⊗_k U_{w_k} ⊗ 1)|√ρ_S^{⊗n}⟩`.
fn chain_factor(model: &CollisionModel, n: usize) -> Result<ComplexMatrix> {
    let d = model.d;
    let dim = (d as u128).pow(2 * n as u32);
    check_dim("chain state dimension", dim)?;
    let m = purification_factor(model)?;
    let mn = tensor_all(std::iter::repeat_n(&m, n));
    let words = model.positive_words(n)?;
    let dd = model.alphabet_size();
    let cols: Vec<_> = words
        .par_iter()
        .map(|&(idx, p)| {
            let w = tensor_all(
                word_from_index(idx, dd, n)
                    .iter()
                    .map(|&k| &model.unitaries[k]),
            );
            vec_row_major(&(w * &mn)).scale(p.sqrt())
        })
        .collect();
    let mut y = ComplexMatrix::zeros(dim as usize, cols.len());
    for (k, col) in cols.iter().enumerate() {
        y.set_column(k, col);
    }
    Ok(y)
}

/// Dense chain part `(T_n^‡ ⊗ id)[|√ρ_S^{⊗n}⟩⟨√ρ_S^{⊗n}|]`, ordered as
/// (output slots 1..n) ⊗ (partner slots 1..n).
pub fn chain_state(model: &CollisionModel, n: usize) -> Result<DensityMatrix> {
    let y = chain_factor(model, n)?;
    DensityMatrix::new(hermitian_part(&gram_rows(&y)))
}

fn fit_length(mut v: Vec<f64>, len: usize) -> Vec<f64> {
    v.sort_by(|x, y| y.total_cmp(x));
    v.resize(len, 0.0);
    v
}

pub fn factorized_spectrum(
    model: &CollisionModel,
    n: usize,
    method: ChainSpectrumMethod,
) -> Result<FactorizedSpectrum> {
    let d = model.d;
    // fails early on a non-faithful state
    purification_factor(model)?;
    let system_spectrum = model.system_state().eigenvalues();
    let full_dim = (d as u128).pow(2 * n as u32);
    let words = model.positive_words(n)?;
    let chosen = match method {
        ChainSpectrumMethod::Auto => {
            if model.is_trace_orthogonal(1e-12) {
                ChainSpectrumMethod::Probabilities
            } else if (words.len() as u128) <= full_dim && words.len() <= crate::error::DIM_GUARD {
                ChainSpectrumMethod::WordGram
            } else {
                ChainSpectrumMethod::Dense
            }
        }
        m => m,
    };
    let target_len = if full_dim <= 1 << 24 {
        Some(full_dim as usize)
    } else {
        None
    };
    let raw = match chosen {
        ChainSpectrumMethod::Probabilities => words.iter().map(|(_, p)| *p).collect::<Vec<_>>(),
        ChainSpectrumMethod::WordGram => {
            check_dim("word Gram dimension", words.len() as u128)?;
            let o = model.overlap_matrix();
            let dd = model.alphabet_size();
            let expanded: Vec<Vec<usize>> = words
                .iter()
                .map(|(i, _)| word_from_index(*i, dd, n))
                .collect();
            let g = ComplexMatrix::from_fn(words.len(), words.len(), |a, b| {
                let mut z = c((words[a].1 * words[b].1).sqrt(), 0.0);
                for k in 0..n {
                    z *= o[(expanded[a][k], expanded[b][k])];
                }
                z
            });
            hermitian_eigenvalues(&g)
        }
        ChainSpectrumMethod::Dense => {
            let y = chain_factor(model, n)?;
            // the smaller Gram of the factor has the same nonzero spectrum
            if y.ncols() < y.nrows() {
                hermitian_eigenvalues(&(y.adjoint() * &y))
            } else {
                hermitian_eigenvalues(&gram_rows(&y))
            }
        }
        ChainSpectrumMethod::Auto => unreachable!(),
    };
    let raw: Vec<f64> = raw.into_iter().map(|x| x.max(0.0)).collect();
    let chain_spectrum = match target_len {
        Some(len) => fit_length(raw, len),
        None => fit_length(raw.clone(), raw.len()),
    };
    Ok(FactorizedSpectrum {
        n,
        d,
        system_spectrum,
        chain_spectrum,
        method: chosen,
    })
}

/// Dense factorized coarse-grained state
/// `ρ_S ⊗ ρ_S ⊗ (T_n^‡ ⊗ id)[|√ρ_S^{⊗n}⟩⟨√ρ_S^{⊗n}|]`.
///
/// It is isospectral with `coarse_grained_bruteforce(model,
/// special_povm(ρ_S), n)`; the two differ by a permutation of tensor
/// factors.
pub fn factorized_coarse_grained(model: &CollisionModel, n: usize) -> Result<DensityMatrix> {
    let d = model.d;
    check_dim("factorized dimension", (d as u128).pow(2 * n as u32 + 2))?;
    let chain = chain_state(model, n)?;
    let sys = model.system_state().tensor(model.system_state());
    Ok(sys.tensor(&chain))
}

/// Whether `Λ` given by a transfer matrix is completely positive.
pub fn transfer_is_cp(t: &ComplexMatrix, tol: f64) -> bool {
    let choi = crate::linalg::choi_from_transfer(t);
    crate::linalg::is_psd(&choi, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{apply_transfer, trace_norm, transfer_from_fn};
    use crate::random::{random_density, random_unitary};
    use crate::source::{four_symbol_chain, ChainParams};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bernoulli4() -> StationarySource {
        StationarySource::bernoulli(vec![0.4, 0.25, 0.25, 0.1]).unwrap()
    }

    fn chain(p: f64, r: f64, d: f64) -> StationarySource {
        four_symbol_chain(&ChainParams::new(p, r, d).unwrap()).unwrap()
    }

    fn matrix_basis(d: usize) -> Vec<ComplexMatrix> {
        let mut out = vec![];
        for i in 0..d {
            for j in 0..d {
                let mut e = ComplexMatrix::zeros(d, d);
                e[(i, j)] = ONE;
                out.push(e);
            }
        }
        out
    }

    #[test]
    fn reduced_map_n0_is_identity() {
        let m = CollisionModel::pauli(chain(0.25, 0.1, 0.1)).unwrap();
        for e in matrix_basis(2) {
            assert_eq!(reduced_map_apply(&m, 0, &e).unwrap(), e);
        }
    }

    #[test]
    fn bernoulli_reduced_map_is_semigroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let us: Vec<_> = (0..3).map(|_| random_unitary(2, &mut rng)).collect();
        let src = StationarySource::bernoulli(vec![0.5, 0.3, 0.2]).unwrap();
        let m = CollisionModel::with_maximally_mixed(us, src).unwrap();
        for e in matrix_basis(2) {
            let three = reduced_map_apply(&m, 3, &e).unwrap();
            let mut iter = e.clone();
            for _ in 0..3 {
                iter = reduced_map_apply(&m, 1, &iter).unwrap();
            }
            assert_abs_diff_eq!(max_abs_diff(&three, &iter), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn extreme_chain_reduced_map() {
        let m = CollisionModel::pauli(chain(0.5, 0.0, 0.5)).unwrap();
        for e in matrix_basis(2) {
            assert_abs_diff_eq!(
                max_abs_diff(&reduced_map_apply(&m, 2, &e).unwrap(), &e),
                0.0,
                epsilon = 1e-15
            );
        }
        assert_abs_diff_eq!(
            trace_norm(&reduced_map_apply(&m, 1, &pauli(1)).unwrap()),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn reduced_map_is_unital_and_follows_word_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let us: Vec<_> = (0..2).map(|_| random_unitary(2, &mut rng)).collect();
        // deterministic alternation 0,1,0,1,...
        let t = nalgebra::DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let src = StationarySource::markov(t, vec![0.5, 0.5]).unwrap();
        let m = CollisionModel::with_maximally_mixed(us.clone(), src).unwrap();
        let x = pauli(3);
        let got = reduced_map_apply(&m, 2, &x).unwrap();
        // words 01 and 10: φ_0∘φ_1 and φ_1∘φ_0
        let v01 = &us[1] * &us[0];
        let v10 = &us[0] * &us[1];
        let expect = (v01.adjoint() * &x * &v01 + v10.adjoint() * &x * &v10).scale(0.5);
        assert_abs_diff_eq!(max_abs_diff(&got, &expect), 0.0, epsilon = 1e-14);
        let one = reduced_map_apply(&m, 3, &identity(2)).unwrap();
        assert_abs_diff_eq!(max_abs_diff(&one, &identity(2)), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn bruteforce_n0_is_gram() {
        let m = CollisionModel::pauli(bernoulli4()).unwrap();
        let rho = coarse_grained_bruteforce(&m, &Povm::trivial(2), 0).unwrap();
        assert_eq!(rho.dim(), 1);
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bruteforce_special_povm_bernoulli_entropy() {
        let m = CollisionModel::pauli(bernoulli4()).unwrap();
        let f = special_povm(m.system_state()).unwrap();
        let rho = coarse_grained_bruteforce(&m, &f, 1).unwrap();
        let expect = 2.0 * 2f64.ln() + shannon_entropy(&[0.4, 0.25, 0.25, 0.1]);
        assert_abs_diff_eq!(rho.entropy(), expect, epsilon = 1e-10);
    }

    #[test]
    fn bruteforce_compatibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let us: Vec<_> = (0..2).map(|_| random_unitary(2, &mut rng)).collect();
        let t = nalgebra::DMatrix::from_row_slice(2, 2, &[0.9, 0.3, 0.1, 0.7]);
        let src = StationarySource::markov(t, vec![0.75, 0.25]).unwrap();
        let m = CollisionModel::with_maximally_mixed(us, src).unwrap();
        let povm = crate::random::random_povm(2, 2, &mut rng);
        let three = coarse_grained_bruteforce(&m, &povm, 2).unwrap();
        let two = coarse_grained_bruteforce(&m, &povm, 1).unwrap();
        let pt = partial_trace(three.matrix(), &[2, 2, 2], &[0, 1]).unwrap();
        assert_abs_diff_eq!(max_abs_diff(&pt, two.matrix()), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn bruteforce_guard() {
        let m = CollisionModel::pauli(bernoulli4()).unwrap();
        let f = special_povm(m.system_state()).unwrap();
        assert!(matches!(
            coarse_grained_bruteforce(&m, &f, 6),
            Err(AlfError::GuardExceeded { .. })
        ));
    }

    #[test]
    fn special_povm_examples() {
        let f = special_povm(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert_eq!(f.len(), 4);
        let h = 0.5f64.sqrt();
        for (k, x) in f.elements().iter().enumerate() {
            let (a, b) = (k / 2, k % 2);
            assert_abs_diff_eq!(x[(a, b)].re, h, epsilon = 1e-15);
            assert_abs_diff_eq!(x.iter().map(|z| z.norm()).sum::<f64>(), h, epsilon = 1e-15);
        }
        let rho = DensityMatrix::from_diagonal(&[0.9, 0.1]).unwrap();
        let f = special_povm(&rho).unwrap();
        assert_abs_diff_eq!(f.elements()[1][(0, 1)].re, 0.9f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(f.elements()[2][(1, 0)].re, 0.1f64.sqrt(), epsilon = 1e-15);
        let mut back = ComplexMatrix::zeros(2, 2);
        for x in f.elements() {
            back += x * rho.matrix() * x.adjoint();
        }
        assert_abs_diff_eq!(max_abs_diff(&back, rho.matrix()), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn tn_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let us: Vec<_> = (0..3).map(|_| random_unitary(2, &mut rng)).collect();
        let src = StationarySource::bernoulli(vec![0.2, 0.5, 0.3]).unwrap();
        let m = CollisionModel::with_maximally_mixed(us, src).unwrap();
        let t1 = build_tn(&m, 1).unwrap();
        for e in matrix_basis(2) {
            assert_abs_diff_eq!(
                max_abs_diff(
                    &t1.apply(&e).unwrap(),
                    &reduced_map_apply(&m, 1, &e).unwrap()
                ),
                0.0,
                epsilon = 1e-14
            );
        }
        let t2 = build_tn(&m, 2).unwrap();
        for a in matrix_basis(2) {
            for b in matrix_basis(2) {
                let lhs = t2.apply(&a.kronecker(&b)).unwrap();
                let la = reduced_map_apply(&m, 1, &a).unwrap();
                let lb = reduced_map_apply(&m, 1, &b).unwrap();
                assert_abs_diff_eq!(max_abs_diff(&lhs, &la.kronecker(&lb)), 0.0, epsilon = 1e-14);
            }
        }
        let one = t2.apply(&identity(4)).unwrap();
        assert_abs_diff_eq!(max_abs_diff(&one, &identity(4)), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn tn_correlated_remainder_scales_with_p_delta() {
        // T_2 − Λ_1⊗Λ_1 on σ_1⊗σ_1 equals 4pΔ σ_1⊗σ_1 for the four-symbol chain
        for &(p, r, dl) in &[(0.25, 0.1, 0.1), (0.2, 0.1, 0.05), (0.3, 0.2, 0.3)] {
            let m = CollisionModel::pauli(chain(p, r, dl)).unwrap();
            let t2 = build_tn(&m, 2).unwrap();
            let x = pauli(1).kronecker(&pauli(1));
            let l1 = reduced_map_apply(&m, 1, &pauli(1)).unwrap();
            let diff = t2.apply(&x).unwrap() - l1.kronecker(&l1);
            assert_abs_diff_eq!(
                max_abs_diff(&diff, &x.scale(4.0 * p * dl)),
                0.0,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn transfer_matrix_matches_apply() {
        let m = CollisionModel::pauli(chain(0.25, 0.1, 0.1)).unwrap();
        let t2 = build_tn(&m, 2).unwrap();
        let tm = t2.transfer_matrix().unwrap();
        for e in matrix_basis(4).into_iter().step_by(3) {
            assert_abs_diff_eq!(
                max_abs_diff(&apply_transfer(&tm, &e), &t2.apply(&e).unwrap()),
                0.0,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn qr_test_examples() {
        let m = CollisionModel::pauli(bernoulli4()).unwrap();
        let rep = qr_factorization_test(&m, 2, 1e-10).unwrap();
        assert!(rep.holds && rep.deviation <= 1e-10);
        let l1 = transfer_from_fn(2, |x| reduced_map_apply(&m, 1, x).unwrap());
        for f in rep.factors.as_ref().unwrap() {
            assert_abs_diff_eq!(max_abs_diff(f, &l1), 0.0, epsilon = 1e-14);
            assert!(transfer_is_cp(f, 1e-9));
        }
        let m0 = CollisionModel::pauli(chain(0.25, 0.1, 0.0)).unwrap();
        assert!(qr_factorization_test(&m0, 3, 1e-10).unwrap().holds);
        let mc = CollisionModel::pauli(chain(0.25, 0.1, 0.1)).unwrap();
        let rep = qr_factorization_test(&mc, 2, 1e-10).unwrap();
        assert!(!rep.holds && rep.deviation > 0.01 && rep.factors.is_none());
        assert!(qr_factorization_test(&mc, 1, 1e-10).is_err());
    }

    #[test]
    fn weyl_examples() {
        let w2 = weyl_unitaries(2).unwrap();
        let expected = [identity(2), pauli(3), pauli(1), pauli(1) * pauli(3)];
        for (u, e) in w2.iter().zip(expected.iter()) {
            assert_abs_diff_eq!(max_abs_diff(u, e), 0.0, epsilon = 1e-15);
        }
        let w3 = weyl_unitaries(3).unwrap();
        assert_abs_diff_eq!(max_abs_diff(&w3[0], &identity(3)), 0.0, epsilon = 1e-15);
        for (j, a) in w3.iter().enumerate() {
            for (k, b) in w3.iter().enumerate() {
                let g = (a.adjoint() * b).trace();
                let expect = if j == k { 3.0 } else { 0.0 };
                assert_abs_diff_eq!(g.re, expect, epsilon = 1e-10);
                assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-10);
            }
        }
        assert!(weyl_unitaries(1).is_err());
    }

    #[test]
    fn factorized_deterministic_environment() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_unitary(2, &mut rng);
        let src = StationarySource::bernoulli(vec![1.0]).unwrap();
        let m = CollisionModel::with_maximally_mixed(vec![u], src).unwrap();
        let rho = factorized_coarse_grained(&m, 1).unwrap();
        assert_abs_diff_eq!(rho.entropy(), 2.0 * 2f64.ln(), epsilon = 1e-12);
        let chain = chain_state(&m, 1).unwrap();
        assert_abs_diff_eq!(chain.entropy(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pauli_chain_part_has_probability_spectrum() {
        let m = CollisionModel::pauli(chain(0.25, 0.1, 0.1)).unwrap();
        for n in 1..=3 {
            let mut probs = m.source().word_probabilities(n).unwrap();
            probs.sort_by(|a, b| b.total_cmp(a));
            let dense = chain_state(&m, n).unwrap().eigenvalues();
            for (x, y) in dense.iter().zip(&probs) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn factorized_matches_bruteforce_random_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let us: Vec<_> = (0..3).map(|_| random_unitary(2, &mut rng)).collect();
        let t = crate::random::random_column_stochastic(3, &mut rng);
        let mut p = vec![1.0 / 3.0; 3];
        for _ in 0..2000 {
            let q: Vec<f64> = (0..3)
                .map(|i| (0..3).map(|j| t[(i, j)] * p[j]).sum())
                .collect();
            p = q;
        }
        let s: f64 = p.iter().sum();
        let p: Vec<f64> = p.iter().map(|x| x / s).collect();
        let src = StationarySource::markov(t, p).unwrap();
        let m = CollisionModel::new(us, src, random_density(2, &mut rng)).unwrap();
        let f = special_povm(m.system_state()).unwrap();
        let brute = coarse_grained_bruteforce(&m, &f, 2).unwrap().eigenvalues();
        for method in [
            ChainSpectrumMethod::WordGram,
            ChainSpectrumMethod::Dense,
            ChainSpectrumMethod::Auto,
        ] {
            let fact = factorized_spectrum(&m, 2, method).unwrap().spectrum();
            assert_eq!(fact.len(), brute.len());
            for (x, y) in fact.iter().zip(&brute) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
        let dense = factorized_coarse_grained(&m, 2).unwrap().eigenvalues();
        for (x, y) in dense.iter().zip(&brute) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn faithfulness_required() {
        let src = StationarySource::bernoulli(vec![1.0]).unwrap();
        let rho = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let m = CollisionModel::new(vec![identity(2)], src, rho).unwrap();
        assert!(matches!(
            factorized_spectrum(&m, 1, ChainSpectrumMethod::Auto),
            Err(AlfError::NotFaithful { .. })
        ));
        assert!(matches!(
            special_povm(m.system_state()),
            Err(AlfError::NotFaithful { .. })
        ));
    }

    #[test]
    fn model_validation() {
        let src = StationarySource::bernoulli(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            CollisionModel::with_maximally_mixed(vec![identity(2)], src.clone()),
            Err(AlfError::DimensionMismatch(_))
        ));
        let bad = vec![identity(2), identity(2).scale(1.1)];
        assert!(matches!(
            CollisionModel::with_maximally_mixed(bad, src),
            Err(AlfError::NotUnitary { index: 1, .. })
        ));
    }

    #[test]
    fn ordered_sum_is_exact_for_integers() {
        let s = ordered_sum(1000, ComplexMatrix::zeros(1, 1), |r| {
            ComplexMatrix::from_element(1, 1, c(r.map(|k| k as f64).sum(), 0.0))
        });
        assert_eq!(s[(0, 0)].re, 499_500.0);
    }
}
