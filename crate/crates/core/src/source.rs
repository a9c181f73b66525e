// Copyright 2026 The alf-entropy Authors
// SPDX-License-Identifier: Apache-2.0

//! Classical stationary sources driving the collisional environment.
//!
//! Markov transition matrices are column-stochastic: `t[(i, j)]` is the
//! probability that the next symbol is `i` given that the current one is
//! `j`, so every column sums to one and the stationary vector satisfies
//! `T p = p`.
//!
//! Words are enumerated lexicographically with the first symbol most
//! significant: the word `(i_1, …, i_n)` has index `Σ_k i_k D^{n−k}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_words, AlfError, Result};
use crate::linalg::{eta, shannon_entropy};

const TOL_SUM: f64 = 1e-12;
const TOL_STATIONARY: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum SourceKind {
    Bernoulli { p: Vec<f64> },
    Markov { t: DMatrix<f64>, p: Vec<f64> },
}

/// Shift-invariant classical source over the alphabet {0, …, D−1}.
#[derive(Clone, Debug, PartialEq)]
pub struct StationarySource {
    kind: SourceKind,
}

fn check_probability_vector(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(AlfError::InvalidProbability(
            "empty probability vector".into(),
        ));
    }
    if let Some(x) = p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(AlfError::InvalidProbability(format!(
            "entry {x} outside [0, 1]"
        )));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > TOL_SUM {
        return Err(AlfError::InvalidProbability(format!("entries sum to {s}")));
    }
    Ok(())
}

impl StationarySource {
    pub fn bernoulli(p: Vec<f64>) -> Result<Self> {
        check_probability_vector(&p)?;
        Ok(Self {
            kind: SourceKind::Bernoulli { p },
        })
    }

    /// Markov source from a column-stochastic `t` and its stationary vector.
    /// The stationary vector is validated, never solved for.
    pub fn markov(t: DMatrix<f64>, p: Vec<f64>) -> Result<Self> {
        check_probability_vector(&p)?;
        let d = p.len();
        if t.shape() != (d, d) {
            return Err(AlfError::DimensionMismatch(format!(
                "transition matrix {}x{} for alphabet {d}",
                t.nrows(),
                t.ncols()
            )));
        }
        for j in 0..d {
            let col: Vec<f64> = t.column(j).iter().copied().collect();
            check_probability_vector(&col)
                .map_err(|e| AlfError::InvalidProbability(format!("column {j} of T: {e}")))?;
        }
        for i in 0..d {
            let tp: f64 = (0..d).map(|j| t[(i, j)] * p[j]).sum();
            if (tp - p[i]).abs() > TOL_STATIONARY {
                return Err(AlfError::InvalidProbability(format!(
                    "p is not stationary: (Tp)_{i} = {tp} vs p_{i} = {}",
                    p[i]
                )));
            }
        }
        Ok(Self {
            kind: SourceKind::Markov { t, p },
        })
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    pub fn is_bernoulli(&self) -> bool {
        matches!(self.kind, SourceKind::Bernoulli { .. })
    }

    pub fn alphabet_size(&self) -> usize {
        self.marginal().len()
    }

    /// One-site distribution π_1.
    pub fn marginal(&self) -> &[f64] {
        match &self.kind {
            SourceKind::Bernoulli { p } | SourceKind::Markov { p, .. } => p,
        }
    }

    /// P(next = i | current = j).
    pub fn transition(&self, i: usize, j: usize) -> f64 {
        match &self.kind {
            SourceKind::Bernoulli { p } => p[i],
            SourceKind::Markov { t, .. } => t[(i, j)],
        }
    }

    pub fn joint_probability(&self, word: &[usize]) -> Result<f64> {
        let d = self.alphabet_size();
        let (&first, rest) = word
            .split_first()
            .ok_or_else(|| AlfError::InvalidArgument("empty word".into()))?;
        if let Some(s) = word.iter().find(|&&s| s >= d) {
            return Err(AlfError::InvalidArgument(format!(
                "symbol {s} outside alphabet of size {d}"
            )));
        }
        let mut prob = self.marginal()[first];
        let mut prev = first;
        for &s in rest {
            prob *= self.transition(s, prev);
            prev = s;
        }
        Ok(prob)
    }

    /// Probabilities of all `D^n` words in lexicographic order (`n = 0`
    /// gives the single empty word).
    pub fn word_probabilities(&self, n: usize) -> Result<Vec<f64>> {
        let d = self.alphabet_size();
        check_words(d, n)?;
        if n == 0 {
            return Ok(vec![1.0]);
        }
        let mut probs = self.marginal().to_vec();
        for _ in 1..n {
            let mut next = Vec::with_capacity(probs.len() * d);
            for (w, &pw) in probs.iter().enumerate() {
                let last = w % d;
                next.extend((0..d).map(|s| pw * self.transition(s, last)));
            }
            probs = next;
        }
        Ok(probs)
    }

    /// Shannon entropy H(π_[1,n]) in nats.
    pub fn block_entropy(&self, n: usize) -> Result<f64> {
        Ok(shannon_entropy(&self.word_probabilities(n)?))
    }

    /// Mean entropy per symbol.
    pub fn entropy_rate(&self) -> f64 {
        match &self.kind {
            SourceKind::Bernoulli { p } => shannon_entropy(p),
            SourceKind::Markov { t, p } => {
                let d = p.len();
                (0..d)
                    .map(|j| p[j] * (0..d).map(|i| eta(t[(i, j)])).sum::<f64>())
                    .sum()
            }
        }
    }

    /// I(π_1; π_2) = 2 H(π_1) − H(π_[1,2]).
    pub fn two_site_mutual_information(&self) -> f64 {
        let h1 = shannon_entropy(self.marginal());
        let h2 = self
            .block_entropy(2)
            .expect("two-site block is always enumerable for a validated source");
        2.0 * h1 - h2
    }
}

/// Symbols of the word with lexicographic index `index`.
pub fn word_from_index(mut index: usize, alphabet: usize, n: usize) -> Vec<usize> {
    let mut w = vec![0; n];
    for k in (0..n).rev() {
        w[k] = index % alphabet;
        index /= alphabet;
    }
    w
}

/// Parameters of the four-symbol chain with stationary vector (p0, p, p, r).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainParams {
    pub p: f64,
    pub r: f64,
    pub delta: f64,
}

impl ChainParams {
    pub fn new(p: f64, r: f64, delta: f64) -> Result<Self> {
        let params = Self { p, r, delta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { p, r, delta } = *self;
        const T: f64 = 1e-12;
        if ![p, r, delta].iter().all(|x| x.is_finite()) {
            return Err(AlfError::InvalidParams("non-finite parameter".into()));
        }
        if !(-T..=0.5 + T).contains(&p) {
            return Err(AlfError::InvalidParams(format!("p = {p} outside [0, 1/2]")));
        }
        if delta < -T || delta > p + T {
            return Err(AlfError::InvalidParams(format!(
                "delta = {delta} outside [0, p = {p}]"
            )));
        }
        if !(-T..=1.0 + T).contains(&r) {
            return Err(AlfError::InvalidParams(format!("r = {r} outside [0, 1]")));
        }
        if 1.0 - 2.0 * p - r < -T {
            return Err(AlfError::InvalidParams(format!(
                "p0 = 1 - 2p - r = {} is negative",
                1.0 - 2.0 * p - r
            )));
        }
        Ok(())
    }

    pub fn p0(&self) -> f64 {
        (1.0 - 2.0 * self.p - self.r).max(0.0)
    }

    /// A = 1 − 2(p + r).
    pub fn a(&self) -> f64 {
        1.0 - 2.0 * (self.p + self.r)
    }

    /// B = √(A² + 16 p Δ).
    pub fn b(&self) -> f64 {
        (self.a().powi(2) + 16.0 * self.p * self.delta).sqrt()
    }

    /// Stationary vector (p0, p, p, r).
    pub fn stationary(&self) -> Vec<f64> {
        vec![self.p0(), self.p, self.p, self.r]
    }

    pub fn transition_matrix(&self) -> DMatrix<f64> {
        let (p0, p, r, dl) = (self.p0(), self.p, self.r, self.delta);
        DMatrix::from_row_slice(
            4,
            4,
            &[
                p0,
                p0,
                p0,
                p0, //
                p,
                p + dl,
                p - dl,
                p, //
                p,
                p - dl,
                p + dl,
                p, //
                r,
                r,
                r,
                r,
            ],
        )
    }

    /// Closed-form two-site mutual information 4p²(ln 2 − h(1/2 + Δ/2p)).
    pub fn mutual_information(&self) -> f64 {
        if self.p == 0.0 {
            return 0.0;
        }
        let x = 0.5 + self.delta / (2.0 * self.p);
        4.0 * self.p * self.p * (std::f64::consts::LN_2 - (eta(x) + eta(1.0 - x)))
    }
}

/// Markov source of the four-symbol chain.
pub fn four_symbol_chain(params: &ChainParams) -> Result<StationarySource> {
    params.validate()?;
    StationarySource::markov(params.transition_matrix(), params.stationary())
}
