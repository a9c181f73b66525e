// Copyright 2026 The alf-entropy Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlfError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace {trace} is not 1")]
    NotNormalized { trace: f64 },

    #[error("state is not faithful (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotFaithful { min_eigenvalue: f64 },

    #[error("POVM completeness violated (deviation {deviation:.3e})")]
    PovmIncomplete { deviation: f64 },

    #[error("unitary {index} fails U*U = 1 (deviation {deviation:.3e})")]
    NotUnitary { index: usize, deviation: f64 },

    #[error("invalid probability data: {0}")]
    InvalidProbability(String),

    #[error("invalid chain parameters: {0}")]
    InvalidParams(String),

    #[error("{what} = {value} exceeds the limit {limit}")]
    GuardExceeded {
        what: &'static str,
        value: u128,
        limit: u128,
    },

    #[error("step {step}: predecessor map is singular, intertwiner undefined")]
    NotInvertible { step: usize },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, AlfError>;

/// Matrix dimension ceiling for dense states.
pub const DIM_GUARD: usize = 4096;

/// Ceiling on the number of enumerated environment words.
pub const WORD_GUARD: u128 = 10_000_000;

pub(crate) fn check_dim(what: &'static str, dim: u128) -> Result<()> {
    if dim > DIM_GUARD as u128 {
        return Err(AlfError::GuardExceeded {
            what,
            value: dim,
            limit: DIM_GUARD as u128,
        });
    }
    Ok(())
}

pub(crate) fn check_words(alphabet: usize, n: usize) -> Result<u128> {
    let mut count: u128 = 1;
    for _ in 0..n {
        count = count.saturating_mul(alphabet as u128);
        if count > WORD_GUARD {
            return Err(AlfError::GuardExceeded {
                what: "word count",
                value: count,
                limit: WORD_GUARD,
            });
        }
    }
    Ok(count)
}
