// Copyright 2026 The alf-entropy Authors
// SPDX-License-Identifier: Apache-2.0

//! Dynamical (Alicki-Lindblad-Fannes) entropy of open quantum systems driven
//! by collisions with a classical stationary chain.
//!
//! Modules, bottom up:
//! - [`linalg`]: dense complex matrices, partial traces, entropies, norms.
//! - [`source`]: Bernoulli and Markov sources, block entropies.
//! - [`collision`]: collisional model, coarse-grained states, the `T_n` map
//!   and the quantum-regression test.
//! - [`pauli`]: closed-form qubit spectra, divisibility, the two-qubit
//!   dilation and revival searches.
//! - [`entropy`]: rate sequences, bounds and the back-flow measure.

pub mod collision;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod pauli;
pub mod random;
pub mod source;

pub use error::{AlfError, Result};
