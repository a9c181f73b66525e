// Copyright 2026 The alf-entropy Authors
// SPDX-License-Identifier: Apache-2.0

//! Pauli-diagonal dynamics of the qubit model driven by the four-symbol
//! chain: eigenvalue recursions, divisibility thresholds, the two-qubit
//! dilation `Γ_n` and trace-norm revival searches.
//!
//! A one-qubit Pauli map multiplies `σ_α` by `λ^{(α)}`; its Kraus weights
//! `q_β` (for `σ_β · σ_β`) satisfy `λ^{(α)} = Σ_β s(α,β) q_β` with
//! `s(α,β) = +1` when `σ_α` and `σ_β` commute and `−1` otherwise, hence
//! `q = H λ / 4`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::collision::CollisionModel;
use crate::error::{check_words, AlfError, Result};
use crate::linalg::{c, min_eigenvalue, pauli, trace_norm, ComplexMatrix, ZERO};
use crate::random::{random_hermitian, random_state_vector};
use crate::source::{word_from_index, ChainParams};

/// Threshold on trace-norm increases counted as revivals.
pub const TOL_REVIVAL: f64 = 1e-9;
/// Predecessor eigenvalues at or below this magnitude make an intertwiner
/// undefined. Geometric decay reaches 1e-15 within a few dozen steps, so
/// only zero and subnormal values count.
pub const TOL_SINGULAR: f64 = f64::MIN_POSITIVE;
const TOL_CP: f64 = 1e-12;

/// `s(α, β)`: +1 if σ_α and σ_β commute.
pub fn commutation_sign(a: usize, b: usize) -> f64 {
    if a == 0 || b == 0 || a == b {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OneQubitPauliSpectrum {
    pub n: usize,
    /// Eigenvalue on σ_1 and σ_2.
    pub lambda: f64,
    /// Eigenvalue on σ_3.
    pub lambda3: f64,
    pub params: ChainParams,
    pub a: f64,
    pub b: f64,
}

impl OneQubitPauliSpectrum {
    /// Eigenvalues on (σ_0, σ_1, σ_2, σ_3).
    pub fn multipliers(&self) -> [f64; 4] {
        [1.0, self.lambda, self.lambda, self.lambda3]
    }
}

/// `λ_0..=λ_n` from `λ_k = A λ_{k−1} + 4pΔ λ_{k−2}`, seeded with `λ_0 = 1`,
/// `λ_1 = A`.
pub fn lambda_recursion(params: &ChainParams, n: usize) -> Vec<f64> {
    let a = params.a();
    let k = 4.0 * params.p * params.delta;
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(a);
    }
    for m in 2..=n {
        let next = a * out[m - 1] + k * out[m - 2];
        out.push(next);
    }
    out
}

/// `λ_n = ((B+A)/2B) ((A+B)/2)^n + ((B−A)/2B) ((A−B)/2)^n`.
pub fn lambda_closed_form(params: &ChainParams, n: usize) -> f64 {
    let a = params.a();
    let b = params.b();
    if b == 0.0 {
        // A = 0 and pΔ = 0: the map kills σ_1, σ_2 after one step
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let n = n as i32;
    (b + a) / (2.0 * b) * ((a + b) / 2.0).powi(n) + (b - a) / (2.0 * b) * ((a - b) / 2.0).powi(n)
}

pub fn lambda3(params: &ChainParams, n: usize) -> f64 {
    (1.0 - 4.0 * params.p).powi(n as i32)
}

pub fn one_qubit_spectrum(params: &ChainParams, n: usize) -> Result<OneQubitPauliSpectrum> {
    params.validate()?;
    let rec = lambda_recursion(params, n)[n];
    let closed = lambda_closed_form(params, n);
    if (rec - closed).abs() > 1e-10 {
        return Err(AlfError::InvariantViolation(format!(
            "recursion {rec} and closed form {closed} disagree at n = {n}"
        )));
    }
    Ok(OneQubitPauliSpectrum {
        n,
        lambda: rec,
        lambda3: lambda3(params, n),
        params: *params,
        a: params.a(),
        b: params.b(),
    })
}

/// Weights of `σ_α ⊗ σ_α` conjugations (two-qubit) or `σ_α` conjugations
/// (one qubit).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PauliKrausCoefficients {
    pub q: [f64; 4],
}

impl PauliKrausCoefficients {
    pub fn sum(&self) -> f64 {
        self.q.iter().sum()
    }

    pub fn is_cp(&self, tol: f64) -> bool {
        self.q.iter().all(|&x| x >= -tol)
    }
}

/// `q = H λ / 4` for a one-qubit Pauli map with eigenvalues `lambdas`.
pub fn kraus_from_multipliers(lambdas: [f64; 4]) -> PauliKrausCoefficients {
    let mut q = [0.0; 4];
    for (b, qb) in q.iter_mut().enumerate() {
        *qb = (0..4)
            .map(|a| commutation_sign(a, b) * lambdas[a])
            .sum::<f64>()
            / 4.0;
    }
    PauliKrausCoefficients { q }
}

pub fn kraus_one_qubit(spec: &OneQubitPauliSpectrum) -> PauliKrausCoefficients {
    kraus_from_multipliers(spec.multipliers())
}

/// Two-qubit Pauli map multiplying `σ_α⊗σ_β` by `g[α][β]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoQubitPauliSpectrum {
    pub n: usize,
    pub g: [[f64; 4]; 4],
}

/// Assemble `G` from `λ`, `λ^{(3)}`: ones on the diagonal, `λ` where exactly
/// one index is in {1, 2} and the other in {0, 3}, `λ^{(3)}` elsewhere.
pub fn assemble_g(lambda: f64, lambda3: f64) -> [[f64; 4]; 4] {
    let (l, t) = (lambda, lambda3);
    [
        [1.0, l, l, t],
        [l, 1.0, t, l],
        [l, t, 1.0, l],
        [t, l, l, 1.0],
    ]
}

pub fn two_qubit_spectrum(params: &ChainParams, n: usize) -> Result<TwoQubitPauliSpectrum> {
    let s = one_qubit_spectrum(params, n)?;
    Ok(TwoQubitPauliSpectrum {
        n,
        g: assemble_g(s.lambda, s.lambda3),
    })
}

/// `Q = H G H / 16`: weight of `σ_α⊗σ_β` conjugation.
pub fn kraus_matrix(g: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut q = [[0.0; 4]; 4];
    for (al, row) in q.iter_mut().enumerate() {
        for (be, out) in row.iter_mut().enumerate() {
            let mut s = 0.0;
            for (a, grow) in g.iter().enumerate() {
                for (b, gab) in grow.iter().enumerate() {
                    s += commutation_sign(al, a) * gab * commutation_sign(be, b);
                }
            }
            *out = s / 16.0;
        }
    }
    q
}

/// Diagonal of `Q` for the structured two-qubit spectrum:
/// `((1+2λ+λ3)/4, (1−λ3)/4, (1−λ3)/4, (1−2λ+λ3)/4)`.
pub fn kraus_two_qubit(spec: &TwoQubitPauliSpectrum) -> PauliKrausCoefficients {
    let q = kraus_matrix(&spec.g);
    PauliKrausCoefficients {
        q: [q[0][0], q[1][1], q[2][2], q[3][3]],
    }
}

/// Divisibility thresholds on Δ/A.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    pub cp: f64,
    pub tensor_p: f64,
    pub p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivisibilityReport {
    pub params: ChainParams,
    /// Δ / A.
    pub ratio: f64,
    pub cp_divisible: bool,
    pub tensor_p_divisible: bool,
    pub p_divisible: bool,
    /// Thresholds on Δ/A.
    pub thresholds: Thresholds,
    /// The same thresholds expressed in Δ/p.
    pub boundaries: Thresholds,
}

pub fn divisibility_thresholds(params: &ChainParams) -> Result<Thresholds> {
    params.validate()?;
    let a = params.a();
    if a <= 0.0 {
        return Err(AlfError::InvalidParams(format!(
            "A = 1 - 2(p + r) = {a} must be positive for the divisibility classification"
        )));
    }
    let p = params.p;
    if p <= 0.0 {
        return Err(AlfError::InvalidParams(
            "p must be positive for the divisibility classification".into(),
        ));
    }
    let base = params.r / (2.0 * p);
    let corr = (1.0 - (1.0 - 4.0 * p * (1.0 - 2.0 * p)).sqrt()) / (4.0 * p);
    Ok(Thresholds {
        cp: base,
        tensor_p: base + 0.5 - corr,
        p: base + 0.5,
    })
}

pub fn divisibility_classify(params: &ChainParams) -> Result<DivisibilityReport> {
    let t = divisibility_thresholds(params)?;
    let a = params.a();
    let ratio = params.delta / a;
    let slack = 1e-12;
    let scale = a / params.p;
    Ok(DivisibilityReport {
        params: *params,
        ratio,
        cp_divisible: ratio <= t.cp + slack,
        tensor_p_divisible: ratio <= t.tensor_p + slack,
        p_divisible: ratio <= t.p + slack,
        thresholds: t,
        boundaries: Thresholds {
            cp: t.cp * scale,
            tensor_p: t.tensor_p * scale,
            p: t.p * scale,
        },
    })
}

/// Entrywise ratio `G_n / G_{n−1}` and its Kraus weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaIntertwiner {
    pub n: usize,
    pub g_ratio: [[f64; 4]; 4],
    pub q: PauliKrausCoefficients,
}

#[allow(clippy::needless_range_loop)]
pub fn gamma_intertwiner(params: &ChainParams, n: usize) -> Result<GammaIntertwiner> {
    if n == 0 {
        return Err(AlfError::InvalidArgument(
            "intertwiners start at n = 1".into(),
        ));
    }
    let prev = two_qubit_spectrum(params, n - 1)?;
    let cur = two_qubit_spectrum(params, n)?;
    let mut g_ratio = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            if prev.g[a][b].abs() <= TOL_SINGULAR {
                return Err(AlfError::NotInvertible { step: n });
            }
            g_ratio[a][b] = cur.g[a][b] / prev.g[a][b];
        }
    }
    let q = kraus_matrix(&g_ratio);
    Ok(GammaIntertwiner {
        n,
        g_ratio,
        q: PauliKrausCoefficients {
            q: [q[0][0], q[1][1], q[2][2], q[3][3]],
        },
    })
}

/// One-qubit intertwiner eigenvalues `λ_n / λ_{n−1}` on (σ_0..σ_3).
pub fn lambda_intertwiner(params: &ChainParams, n: usize) -> Result<[f64; 4]> {
    if n == 0 {
        return Err(AlfError::InvalidArgument(
            "intertwiners start at n = 1".into(),
        ));
    }
    let prev = one_qubit_spectrum(params, n - 1)?.multipliers();
    let cur = one_qubit_spectrum(params, n)?.multipliers();
    let mut out = [0.0; 4];
    for k in 0..4 {
        if prev[k].abs() <= TOL_SINGULAR {
            return Err(AlfError::NotInvertible { step: n });
        }
        out[k] = cur[k] / prev[k];
    }
    Ok(out)
}

/// Apply the one-qubit Pauli map with eigenvalues `m`.
pub fn pauli_map_apply(m: &[f64; 4], x: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2, 2);
    for (k, mk) in m.iter().enumerate() {
        let s = pauli(k);
        let coef = (&s * x).trace() * 0.5;
        out += s * (coef * *mk);
    }
    out
}

fn sigma_pair(a: usize, b: usize) -> ComplexMatrix {
    pauli(a).kronecker(&pauli(b))
}

/// Apply the two-qubit Pauli map with multipliers `g`.
pub fn two_qubit_map_apply(g: &[[f64; 4]; 4], x: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4, 4);
    for (a, row) in g.iter().enumerate() {
        for (b, gab) in row.iter().enumerate() {
            let s = sigma_pair(a, b);
            let coef = (&s * x).trace() * 0.25;
            out += s * (coef * *gab);
        }
    }
    out
}

/// Choi matrix of the one-qubit intertwiner `Λ_{n,n−1}`.
pub fn lambda_intertwiner_choi(params: &ChainParams, n: usize) -> Result<ComplexMatrix> {
    let m = lambda_intertwiner(params, n)?;
    Ok(crate::linalg::choi_from_fn(2, |x| pauli_map_apply(&m, x)))
}

/// `Γ_n[X] = Σ_α q_n^{(α)} (σ_α⊗σ_α) X (σ_α⊗σ_α)`.
pub fn gamma_map_apply(params: &ChainParams, n: usize, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.shape() != (4, 4) {
        return Err(AlfError::DimensionMismatch(format!(
            "Γ_n acts on 4x4 matrices, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    let q = kraus_two_qubit(&two_qubit_spectrum(params, n)?);
    let mut out = ComplexMatrix::zeros(4, 4);
    for (a, qa) in q.q.iter().enumerate() {
        let s = sigma_pair(a, a);
        out += (&s * x * &s).scale(*qa);
    }
    Ok(out)
}

/// `Γ_n^{id}[X] = Σ_w p_w (V_w ⊗ V̄_w) X (V_w ⊗ V̄_w)†` for any collision
/// model, `V_w = U_{w_n}⋯U_{w_1}`.
pub fn gns_dilation_apply(
    model: &CollisionModel,
    n: usize,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let d = model.d();
    if x.shape() != (d * d, d * d) {
        return Err(AlfError::DimensionMismatch(format!(
            "dilation acts on {0}x{0} matrices, got {1}x{2}",
            d * d,
            x.nrows(),
            x.ncols()
        )));
    }
    let dd = model.alphabet_size();
    check_words(dd, n)?;
    let probs = model.source().word_probabilities(n)?;
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for (idx, p) in probs.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        let v = model.word_unitary(&word_from_index(idx, dd, n));
        let w = v.kronecker(&v.map(|z| z.conj()));
        out += (&w * x * w.adjoint()).scale(*p);
    }
    Ok(out)
}

/// Indexed family of linear maps `n ↦ Φ_n` on `M_dim`.
pub trait MapFamily: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, n: usize, x: &ComplexMatrix) -> ComplexMatrix;
    /// `Φ_n^{-1}[X]`, when `Φ_n` is invertible and well conditioned.
    fn apply_inverse(&self, _n: usize, _x: &ComplexMatrix) -> Option<ComplexMatrix> {
        None
    }
}

/// Multipliers below this magnitude are not inverted in probe construction.
const TOL_CONDITION: f64 = 1e-6;

/// The one-qubit maps `Λ_n` of the four-symbol chain.
#[derive(Clone, Debug)]
pub struct OneQubitFamily {
    multipliers: Vec<[f64; 4]>,
}

impl OneQubitFamily {
    pub fn new(params: &ChainParams, horizon: usize) -> Result<Self> {
        params.validate()?;
        let l = lambda_recursion(params, horizon);
        let multipliers = (0..=horizon)
            .map(|n| [1.0, l[n], l[n], lambda3(params, n)])
            .collect();
        Ok(Self { multipliers })
    }
}

impl MapFamily for OneQubitFamily {
    fn dim(&self) -> usize {
        2
    }

    fn apply(&self, n: usize, x: &ComplexMatrix) -> ComplexMatrix {
        pauli_map_apply(&self.multipliers[n], x)
    }

    fn apply_inverse(&self, n: usize, x: &ComplexMatrix) -> Option<ComplexMatrix> {
        let m = self.multipliers[n];
        if m.iter().any(|v| v.abs() < TOL_CONDITION) {
            return None;
        }
        Some(pauli_map_apply(&m.map(|v| 1.0 / v), x))
    }
}

/// The two-qubit dilations `Γ_n^{id}` of the four-symbol chain.
#[derive(Clone, Debug)]
pub struct GnsFamily {
    g: Vec<[[f64; 4]; 4]>,
}

impl GnsFamily {
    pub fn new(params: &ChainParams, horizon: usize) -> Result<Self> {
        params.validate()?;
        let l = lambda_recursion(params, horizon);
        let g = (0..=horizon)
            .map(|n| assemble_g(l[n], lambda3(params, n)))
            .collect();
        Ok(Self { g })
    }
}

impl MapFamily for GnsFamily {
    fn dim(&self) -> usize {
        4
    }

    fn apply(&self, n: usize, x: &ComplexMatrix) -> ComplexMatrix {
        two_qubit_map_apply(&self.g[n], x)
    }

    fn apply_inverse(&self, n: usize, x: &ComplexMatrix) -> Option<ComplexMatrix> {
        let g = self.g[n];
        if g.iter().flatten().any(|v| v.abs() < TOL_CONDITION) {
            return None;
        }
        Some(two_qubit_map_apply(&g.map(|row| row.map(|v| 1.0 / v)), x))
    }
}

/// Wraps a closure as a map family.
pub struct FnFamily<F> {
    pub dim: usize,
    pub f: F,
}

impl<F> MapFamily for FnFamily<F>
where
    F: Fn(usize, &ComplexMatrix) -> ComplexMatrix + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, n: usize, x: &ComplexMatrix) -> ComplexMatrix {
        (self.f)(n, x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Revival {
    pub probe: usize,
    pub step: usize,
    pub magnitude: f64,
}

/// All `(probe, n)` with `‖Φ_n[X]‖₁ − ‖Φ_{n−1}[X]‖₁ > tol`, `1 ≤ n ≤ horizon`,
/// ordered by probe then step.
pub fn revival_scan_with_tol(
    family: &dyn MapFamily,
    probes: &[ComplexMatrix],
    horizon: usize,
    tol: f64,
) -> Vec<Revival> {
    probes
        .par_iter()
        .enumerate()
        .map(|(k, x)| probe_revivals(family, k, x, horizon, tol))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn revival_scan(
    family: &dyn MapFamily,
    probes: &[ComplexMatrix],
    horizon: usize,
) -> Vec<Revival> {
    revival_scan_with_tol(family, probes, horizon, TOL_REVIVAL)
}

fn probe_revivals(
    family: &dyn MapFamily,
    k: usize,
    x: &ComplexMatrix,
    horizon: usize,
    tol: f64,
) -> Vec<Revival> {
    let mut out = vec![];
    let mut prev = trace_norm(&family.apply(0, x));
    for n in 1..=horizon {
        let cur = trace_norm(&family.apply(n, x));
        if cur - prev > tol {
            out.push(Revival {
                probe: k,
                step: n,
                magnitude: cur - prev,
            });
        }
        prev = cur;
    }
    out
}

/// The `dim² − 1` traceless Hermitian Pauli products (`dim` = 2 or 4).
pub fn traceless_pauli_basis(dim: usize) -> Vec<ComplexMatrix> {
    match dim {
        2 => (1..4).map(pauli).collect(),
        4 => (1..16).map(|k| sigma_pair(k / 4, k % 4)).collect(),
        _ => panic!("Pauli basis only for one or two qubits"),
    }
}

/// Seeded Gaussian Hermitian probes.
pub fn random_hermitian_probes(dim: usize, count: usize, seed: u64) -> Vec<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_hermitian(dim, &mut rng))
        .collect()
}

fn normalized(x: ComplexMatrix) -> ComplexMatrix {
    let n = trace_norm(&x);
    if n > 0.0 {
        x.unscale(n)
    } else {
        x
    }
}

/// Probe-search settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchOptions {
    pub seed: u64,
    pub refinements: usize,
    pub one_qubit_random_probes: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            refinements: 500,
            one_qubit_random_probes: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub probe: ComplexMatrix,
    pub step: usize,
    pub magnitude: f64,
    /// Position in the search order (grid first, then refinements).
    pub index: usize,
}

/// Grid of single Pauli products and pairs `B_i ± B_j`.
fn grid_probes(dim: usize) -> Vec<ComplexMatrix> {
    let basis = traceless_pauli_basis(dim);
    let mut out: Vec<ComplexMatrix> = basis.clone();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            out.push(&basis[i] + &basis[j]);
            out.push(&basis[i] - &basis[j]);
        }
    }
    out.into_iter().map(normalized).collect()
}

/// Refinement `k`: a Haar-random pure state `Y` pulled back through the map
/// at step `m − 1` (`m` cycling over `1..=horizon`) when that map is
/// invertible, so that the intertwiner at step `m` acts on a state.
fn refinement_probe(family: &dyn MapFamily, horizon: usize, seed: u64, k: usize) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64 + 1);
    let psi = random_state_vector(family.dim(), &mut rng);
    let y = &psi * psi.adjoint();
    let m = 1 + k % horizon.max(1);
    let x = family.apply_inverse(m - 1, &y).unwrap_or(y);
    normalized(crate::linalg::hermitian_part(&x))
}

/// Grid search followed by seeded refinements; the lowest-index probe with a
/// revival wins.
pub fn find_witness(
    family: &dyn MapFamily,
    horizon: usize,
    opts: &SearchOptions,
) -> Option<Witness> {
    let grid = grid_probes(family.dim());
    let first = |probes: &[ComplexMatrix], offset: usize| -> Option<Witness> {
        let hits: Vec<Option<Witness>> = probes
            .par_iter()
            .enumerate()
            .map(|(k, x)| {
                probe_revivals(family, k, x, horizon, TOL_REVIVAL)
                    .first()
                    .map(|r| Witness {
                        probe: x.clone(),
                        step: r.step,
                        magnitude: r.magnitude,
                        index: offset + k,
                    })
            })
            .collect();
        hits.into_iter().flatten().next()
    };
    if let Some(w) = first(&grid, 0) {
        return Some(w);
    }
    let refined: Vec<ComplexMatrix> = (0..opts.refinements)
        .map(|k| refinement_probe(family, horizon, opts.seed, k))
        .collect();
    first(&refined, grid.len())
}

#[derive(Clone, Debug)]
pub struct SuperactivationReport {
    pub divisibility: Option<DivisibilityReport>,
    pub one_qubit_revives: bool,
    pub one_qubit_witness: Option<Witness>,
    pub gns_revives: bool,
    pub witness: Option<Witness>,
}

/// Revival search on `Λ_n` (one qubit) and on `Γ_n^{id}` (two qubits).
pub fn superactivation_witness(
    params: &ChainParams,
    horizon: usize,
    opts: &SearchOptions,
) -> Result<SuperactivationReport> {
    if params.a() <= 0.0 {
        return Err(AlfError::InvalidParams(format!(
            "A = {} must be positive",
            params.a()
        )));
    }
    let divisibility = divisibility_classify(params).ok();
    let lam = OneQubitFamily::new(params, horizon)?;
    let gns = GnsFamily::new(params, horizon)?;

    let mut one_qubit_witness = find_witness(&lam, horizon, opts);
    if one_qubit_witness.is_none() && opts.one_qubit_random_probes > 0 {
        let probes = random_hermitian_probes(2, opts.one_qubit_random_probes, opts.seed);
        one_qubit_witness = revival_scan(&lam, &probes, horizon)
            .first()
            .map(|r| Witness {
                probe: probes[r.probe].clone(),
                step: r.step,
                magnitude: r.magnitude,
                index: r.probe,
            });
    }
    let witness = find_witness(&gns, horizon, opts);
    Ok(SuperactivationReport {
        divisibility,
        one_qubit_revives: one_qubit_witness.is_some(),
        one_qubit_witness,
        gns_revives: witness.is_some(),
        witness,
    })
}

/// Whether every `Γ_{n,n−1}`, `1 ≤ n ≤ horizon`, has nonnegative weights.
pub fn gns_p_divisible(params: &ChainParams, horizon: usize) -> Result<bool> {
    for n in 1..=horizon {
        if !gamma_intertwiner(params, n)?.q.is_cp(TOL_CP) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every one-qubit intertwiner Choi matrix is PSD.
pub fn one_qubit_cp_divisible(params: &ChainParams, horizon: usize) -> Result<bool> {
    for n in 1..=horizon {
        if min_eigenvalue(&lambda_intertwiner_choi(params, n)?) < -TOL_CP {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `|ψ+⟩⟨ψ+|` on two qubits.
pub fn bell_projector() -> ComplexMatrix {
    let mut m = ComplexMatrix::from_element(4, 4, ZERO);
    for &i in &[0usize, 3] {
        for &j in &[0usize, 3] {
            m[(i, j)] = c(0.5, 0.0);
        }
    }
    m
}
