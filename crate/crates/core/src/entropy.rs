// Copyright 2026 The alf-entropy Authors
// SPDX-License-Identifier: Apache-2.0

//! Entropy rates of the coarse-grained states and the bounds around them.
//!
//! `S_n` denotes `S(ρ_S[𝒳^(n)])`, the entropy after `n` measurements
//! interleaved with `n − 1` collisions.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::collision::{
    coarse_grained_bruteforce, factorized_spectrum, ChainSpectrumMethod, CollisionModel,
};
use crate::error::{AlfError, Result};
use crate::linalg::{
    eta, hermitian_eigenvalues, hermitian_part, shannon_entropy, ComplexMatrix, DensityMatrix, Povm,
};
use crate::pauli::{divisibility_classify, Thresholds};
use crate::source::{four_symbol_chain, ChainParams};

/// Slack used when asserting the entropy inequalities.
pub const TOL_INEQUALITY: f64 = 1e-9;
/// Outcomes with probability at or below this are dropped from averages.
pub const TOL_OUTCOME: f64 = 1e-12;

/// Measurement used in a rate sequence.
#[derive(Clone, Debug)]
pub enum PovmChoice {
    /// The state-preserving POVM built on the eigenbasis of `ρ_S`.
    Special,
    Explicit(Povm),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    pub n: usize,
    pub entropy: f64,
    pub rate: f64,
    /// `S_n − S_{n−1}`, with `S_0 = 0`.
    pub increment: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateSequence {
    pub values: Vec<RatePoint>,
}

impl RateSequence {
    /// Last increment.
    pub fn h_estimate(&self) -> f64 {
        self.values.last().map_or(0.0, |v| v.increment)
    }
}

/// `S_n` for a single `n ≥ 1`.
pub fn coarse_grained_entropy(model: &CollisionModel, povm: &PovmChoice, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(AlfError::InvalidArgument("n must be at least 1".into()));
    }
    match povm {
        PovmChoice::Special => {
            Ok(factorized_spectrum(model, n - 1, ChainSpectrumMethod::Auto)?.entropy())
        }
        PovmChoice::Explicit(p) => Ok(coarse_grained_bruteforce(model, p, n - 1)?.entropy()),
    }
}

pub fn rate_sequence(
    model: &CollisionModel,
    povm: &PovmChoice,
    n_max: usize,
) -> Result<RateSequence> {
    if n_max == 0 {
        return Err(AlfError::InvalidArgument("n_max must be at least 1".into()));
    }
    let entropies: Vec<f64> = (1..=n_max)
        .map(|n| coarse_grained_entropy(model, povm, n))
        .collect::<Result<_>>()?;
    let mut prev = 0.0;
    let values = entropies
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let n = k + 1;
            let point = RatePoint {
                n,
                entropy: s,
                rate: s / n as f64,
                increment: s - prev,
            };
            prev = s;
            point
        })
        .collect();
    Ok(RateSequence { values })
}

/// `S(Λ_1^‡ ⊗ id[|√ρ_S⟩⟨√ρ_S|])`.
pub fn qr_rate(model: &CollisionModel) -> Result<f64> {
    Ok(factorized_spectrum(model, 1, ChainSpectrumMethod::Auto)?.chain_entropy())
}

/// Closed-form entropy rate of the four-symbol chain:
/// `η(p0) + η(r) + 2p (η(p+Δ) + η(p−Δ)) + 2(1−2p) η(p)`.
pub fn markov_alf_entropy(params: &ChainParams) -> Result<f64> {
    params.validate()?;
    let ChainParams { p, r, delta } = *params;
    Ok(eta(params.p0())
        + eta(r)
        + 2.0 * p * (eta(p + delta) + eta(p - delta))
        + 2.0 * (1.0 - 2.0 * p) * eta(p))
}

fn check_povm_dim(rho: &DensityMatrix, povm: &Povm) -> Result<()> {
    if rho.dim() != povm.dim() {
        return Err(AlfError::DimensionMismatch(format!(
            "state has dimension {}, POVM acts on {}",
            rho.dim(),
            povm.dim()
        )));
    }
    Ok(())
}

fn matrix_entropy(m: &ComplexMatrix) -> f64 {
    let vals: Vec<f64> = hermitian_eigenvalues(&hermitian_part(m))
        .into_iter()
        .map(|x| x.max(0.0))
        .collect();
    shannon_entropy(&vals)
}

/// `[Tr(ρ X_b† X_a)]_{ab}`.
pub fn one_step_coarse_grained(rho: &DensityMatrix, povm: &Povm) -> Result<ComplexMatrix> {
    check_povm_dim(rho, povm)?;
    let xs = povm.elements();
    let evolved: Vec<ComplexMatrix> = xs.iter().map(|x| x * rho.matrix()).collect();
    Ok(ComplexMatrix::from_fn(xs.len(), xs.len(), |a, b| {
        (xs[b].adjoint() * &evolved[a]).trace()
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PovmBound {
    pub lhs: f64,
    pub rhs: f64,
}

impl PovmBound {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

/// `S(ρ[𝒳]) ≤ S(ρ) + S(Σ_a X_a ρ X_a†)`.
pub fn finite_povm_bound(rho: &DensityMatrix, povm: &Povm) -> Result<PovmBound> {
    let g = one_step_coarse_grained(rho, povm)?;
    let d = rho.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for x in povm.elements() {
        out += x * rho.matrix() * x.adjoint();
    }
    Ok(PovmBound {
        lhs: matrix_entropy(&g),
        rhs: rho.entropy() + matrix_entropy(&out),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyExchange {
    pub exchange: f64,
    pub info_gain: f64,
    pub shannon_outcomes: f64,
}

/// Entropy exchange, average information gain and outcome entropy; fails
/// with `InvariantViolation` if `info_gain ≤ exchange ≤ H(outcomes)` breaks.
pub fn entropy_exchange(rho: &DensityMatrix, povm: &Povm) -> Result<EntropyExchange> {
    let g = one_step_coarse_grained(rho, povm)?;
    let exchange = matrix_entropy(&g);
    let probs: Vec<f64> = (0..g.nrows()).map(|a| g[(a, a)].re.max(0.0)).collect();
    let mut post = 0.0;
    for (x, &pa) in povm.elements().iter().zip(&probs) {
        if pa <= TOL_OUTCOME {
            continue;
        }
        let branch = (x * rho.matrix() * x.adjoint()).unscale(pa);
        post += pa * matrix_entropy(&branch);
    }
    let out = EntropyExchange {
        exchange,
        info_gain: rho.entropy() - post,
        shannon_outcomes: shannon_entropy(&probs),
    };
    if out.info_gain > out.exchange + TOL_INEQUALITY {
        return Err(AlfError::InvariantViolation(format!(
            "information gain {} exceeds entropy exchange {}",
            out.info_gain, out.exchange
        )));
    }
    if out.exchange > out.shannon_outcomes + TOL_INEQUALITY {
        return Err(AlfError::InvariantViolation(format!(
            "entropy exchange {} exceeds outcome entropy {}",
            out.exchange, out.shannon_outcomes
        )));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainBound {
    /// Mean entropy of the chain.
    pub chain_rate: f64,
    /// `chain_rate + ln D`, valid for quantum chains as well.
    pub general: f64,
    /// `chain_rate`, valid for classical chains.
    pub classical_tight: f64,
}

pub fn chain_bound(model: &CollisionModel) -> ChainBound {
    let rate = model.source().entropy_rate();
    ChainBound {
        chain_rate: rate,
        general: rate + (model.alphabet_size() as f64).ln(),
        classical_tight: rate,
    }
}

/// Finite-`n` form: `S(ρ_S[𝒳^(n+1)]) ≤ H(π_[1,n]) + 2 ln d` for any POVM.
pub fn finite_chain_bound(model: &CollisionModel, n: usize) -> Result<f64> {
    Ok(model.source().block_entropy(n)? + 2.0 * (model.d() as f64).ln())
}

/// `qr_rate − (S_{n_max} − S_{n_max−1})` for the special POVM.
pub fn backflow_measure(model: &CollisionModel, n_max: usize) -> Result<f64> {
    if n_max < 2 {
        return Err(AlfError::InvalidArgument(format!(
            "back-flow needs n_max >= 2, got {n_max}"
        )));
    }
    let h = coarse_grained_entropy(model, &PovmChoice::Special, n_max)?
        - coarse_grained_entropy(model, &PovmChoice::Special, n_max - 1)?;
    Ok(qr_rate(model)? - h)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyReport {
    pub n_max: usize,
    pub h_estimate: f64,
    pub qr_rate: f64,
    pub chain_rate: f64,
    pub chain_bound: f64,
    pub backflow_measure: f64,
    pub sequence: RateSequence,
}

pub fn entropy_report(model: &CollisionModel, n_max: usize) -> Result<EntropyReport> {
    if n_max < 2 {
        return Err(AlfError::InvalidArgument(format!(
            "report needs n_max >= 2, got {n_max}"
        )));
    }
    let sequence = rate_sequence(model, &PovmChoice::Special, n_max)?;
    let h = sequence.h_estimate();
    let qr = qr_rate(model)?;
    let bound = chain_bound(model);
    Ok(EntropyReport {
        n_max,
        h_estimate: h,
        qr_rate: qr,
        chain_rate: bound.chain_rate,
        chain_bound: bound.general,
        backflow_measure: qr - h,
        sequence,
    })
}

/// Divisibility region of a chain parameter point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    #[serde(rename = "nonP")]
    NonP,
    #[serde(rename = "P-not-tensorP")]
    PNotTensorP,
    #[serde(rename = "tensorP-not-CP")]
    TensorPNotCp,
    #[serde(rename = "CP")]
    Cp,
    /// Classification undefined (`A ≤ 0` or `p = 0`).
    #[serde(rename = "undefined")]
    Undefined,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::NonP => "nonP",
            Region::PNotTensorP => "P-not-tensorP",
            Region::TensorPNotCp => "tensorP-not-CP",
            Region::Cp => "CP",
            Region::Undefined => "undefined",
        })
    }
}

pub fn region_of(params: &ChainParams) -> Region {
    match divisibility_classify(params) {
        Ok(r) if r.cp_divisible => Region::Cp,
        Ok(r) if r.tensor_p_divisible => Region::TensorPNotCp,
        Ok(r) if r.p_divisible => Region::PNotTensorP,
        Ok(_) => Region::NonP,
        Err(_) => Region::Undefined,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub delta_over_p: f64,
    pub h_closed_form: f64,
    pub h_measured_increment: f64,
    pub qr_rate: f64,
    pub backflow_measure: f64,
    pub region: Region,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyScan {
    pub p: f64,
    pub r: f64,
    pub n_max: usize,
    /// Region edges in Δ/p, when the classification is defined.
    pub boundaries: Option<Thresholds>,
    pub rows: Vec<ScanRow>,
}

/// Evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => (0..points)
            .map(|k| {
                if k + 1 == points {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

/// Entropy of the qubit Pauli model along `Δ/p ∈ grid` at fixed `(p, r)`.
pub fn entropy_scan(p: f64, r: f64, grid: &[f64], n_max: usize) -> Result<EntropyScan> {
    if n_max < 2 {
        return Err(AlfError::InvalidArgument(format!(
            "scan needs n_max >= 2, got {n_max}"
        )));
    }
    let rows = grid
        .par_iter()
        .map(|&x| -> Result<ScanRow> {
            let params = ChainParams::new(p, r, x * p)?;
            let model = CollisionModel::pauli(four_symbol_chain(&params)?)?;
            let h = coarse_grained_entropy(&model, &PovmChoice::Special, n_max)?
                - coarse_grained_entropy(&model, &PovmChoice::Special, n_max - 1)?;
            let qr = qr_rate(&model)?;
            Ok(ScanRow {
                delta_over_p: x,
                h_closed_form: markov_alf_entropy(&params)?,
                h_measured_increment: h,
                qr_rate: qr,
                backflow_measure: qr - h,
                region: region_of(&params),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let boundaries = ChainParams::new(p, r, 0.0)
        .and_then(|pr| divisibility_classify(&pr))
        .map(|rep| rep.boundaries)
        .ok();
    Ok(EntropyScan {
        p,
        r,
        n_max,
        boundaries,
        rows,
    })
}
