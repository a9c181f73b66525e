// Copyright 2026 The alf-entropy Authors
// SPDX-License-Identifier: Apache-2.0

//! Scenario files. See the README for the grammar.

use std::path::Path;

use alf_core::collision::{weyl_unitaries, CollisionModel};
use alf_core::linalg::{c, pauli, ComplexMatrix, DensityMatrix, Povm, Tolerances};
use alf_core::source::{four_symbol_chain, ChainParams, StationarySource};
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::CliError;

/// Rows of `[re, im]` pairs.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    #[default]
    Pauli,
    Weyl,
    Explicit,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default)]
    pub preset: Preset,
    pub d: Option<usize>,
    pub unitaries: Option<Vec<MatrixSpec>>,
    pub state_diagonal: Option<Vec<f64>>,
    pub state: Option<MatrixSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SourceSection {
    /// The four-symbol chain with stationary vector `(1−2p−r, p, p, r)`.
    Chain {
        p: f64,
        r: f64,
        #[serde(default)]
        delta: f64,
    },
    Bernoulli {
        probabilities: Vec<f64>,
    },
    /// `transition[i][j]` is the probability of `i` following `j`.
    Markov {
        transition: Vec<Vec<f64>>,
        stationary: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum PovmName {
    #[default]
    Special,
    Trivial,
    Explicit,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    Natural,
    #[serde(rename = "2")]
    Bits,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Number of collisions for coarse-grain and qr-check.
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    pub grid_points: Option<usize>,
    /// Explicit Δ/p grid; overrides `grid_points`.
    pub delta_over_p: Option<Vec<f64>>,
    pub horizon: Option<usize>,
    pub refinements: Option<usize>,
    pub random_probes: Option<usize>,
    #[serde(default)]
    pub povm: PovmName,
    pub povm_elements: Option<Vec<MatrixSpec>>,
    pub qr_tol: Option<f64>,
    #[serde(default)]
    pub log_base: LogBase,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub model: ModelSection,
    pub source: SourceSection,
    #[serde(default)]
    pub run: RunSection,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub chain: Option<ChainParams>,
    pub model: CollisionModel,
    pub povm: Option<Povm>,
}

fn matrix(spec: &MatrixSpec, what: &str) -> Result<ComplexMatrix, CliError> {
    let rows = spec.len();
    if rows == 0 || spec.iter().any(|r| r.len() != rows) {
        return Err(CliError::Config(format!(
            "{what} must be a non-empty square matrix"
        )));
    }
    Ok(ComplexMatrix::from_fn(rows, rows, |i, j| {
        c(spec[i][j][0], spec[i][j][1])
    }))
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn source(&self) -> Result<(StationarySource, Option<ChainParams>), CliError> {
        Ok(match &self.source {
            SourceSection::Chain { p, r, delta } => {
                let params = ChainParams::new(*p, *r, *delta)?;
                (four_symbol_chain(&params)?, Some(params))
            }
            SourceSection::Bernoulli { probabilities } => {
                (StationarySource::bernoulli(probabilities.clone())?, None)
            }
            SourceSection::Markov {
                transition,
                stationary,
            } => {
                let n = transition.len();
                if transition.iter().any(|row| row.len() != n) {
                    return Err(CliError::Config(
                        "transition must be a square matrix".into(),
                    ));
                }
                let t = DMatrix::from_fn(n, n, |i, j| transition[i][j]);
                (StationarySource::markov(t, stationary.clone())?, None)
            }
        })
    }

    fn unitaries(&self) -> Result<Vec<ComplexMatrix>, CliError> {
        let m = &self.model;
        match m.preset {
            Preset::Pauli => {
                if m.d.is_some_and(|d| d != 2) {
                    return Err(CliError::Config("the pauli preset has d = 2".into()));
                }
                Ok((0..4).map(pauli).collect())
            }
            Preset::Weyl => {
                let d =
                    m.d.ok_or_else(|| CliError::Config("the weyl preset needs model.d".into()))?;
                Ok(weyl_unitaries(d)?)
            }
            Preset::Explicit => {
                let us = m.unitaries.as_ref().ok_or_else(|| {
                    CliError::Config("the explicit preset needs model.unitaries".into())
                })?;
                us.iter().map(|u| matrix(u, "unitary")).collect()
            }
        }
    }

    /// Validate every section and build the model.
    pub fn build(self) -> Result<Scenario, CliError> {
        let (source, chain) = self.source()?;
        let unitaries = self.unitaries()?;
        let d = unitaries.first().map_or(1, |u| u.nrows());
        let tol = &self.run.tolerances;
        let state = match (&self.model.state_diagonal, &self.model.state) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give at most one of state_diagonal and state".into(),
                ));
            }
            (Some(diag), None) => {
                let m = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    diag.len(),
                    diag.iter().map(|x| c(*x, 0.0)),
                ));
                DensityMatrix::with_tolerances(m, tol)?
            }
            (None, Some(spec)) => DensityMatrix::with_tolerances(matrix(spec, "state")?, tol)?,
            (None, None) => DensityMatrix::maximally_mixed(d),
        };
        let model = CollisionModel::new(unitaries, source, state)?;
        let povm = match self.run.povm {
            PovmName::Special => None,
            PovmName::Trivial => Some(Povm::trivial(d)),
            PovmName::Explicit => {
                let els = self.run.povm_elements.as_ref().ok_or_else(|| {
                    CliError::Config("povm = \"explicit\" needs run.povm_elements".into())
                })?;
                let els = els
                    .iter()
                    .map(|e| matrix(e, "POVM element"))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(Povm::with_tolerance(els, tol.povm)?)
            }
        };
        if self.run.povm != PovmName::Explicit && self.run.povm_elements.is_some() {
            return Err(CliError::Config(
                "run.povm_elements given without povm = \"explicit\"".into(),
            ));
        }
        Ok(Scenario {
            config: self,
            chain,
            model,
            povm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_chain() {
        let cfg = ScenarioConfig::parse("[source]\nkind = \"chain\"\np = 0.25\nr = 0.1\n").unwrap();
        let sc = cfg.build().unwrap();
        assert_eq!(sc.chain.unwrap().delta, 0.0);
        assert_eq!(sc.model.d(), 2);
    }

    #[test]
    fn unknown_keys_rejected() {
        for text in [
            "[source]\nkind = \"chain\"\np = 0.25\nr = 0.1\nq = 1\n",
            "[source]\nkind = \"bernoulli\"\nprobabilities = [1.0]\n[run]\nfoo = 1\n",
            "[model]\nsize = 2\n[source]\nkind = \"bernoulli\"\nprobabilities = [1.0]\n",
            "[source]\nkind = \"chain\"\np = 0.25\nr = 0.1\n[extra]\n",
        ] {
            assert!(
                matches!(ScenarioConfig::parse(text), Err(CliError::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn constraints_enforced() {
        let bad =
            ScenarioConfig::parse("[source]\nkind = \"chain\"\np = 0.25\nr = 0.1\ndelta = 0.3\n")
                .unwrap();
        assert!(bad.build().is_err());
        let alphabet =
            ScenarioConfig::parse("[source]\nkind = \"bernoulli\"\nprobabilities = [0.5, 0.5]\n")
                .unwrap();
        assert!(alphabet.build().is_err());
        let weyl = ScenarioConfig::parse(
            "[model]\npreset = \"weyl\"\nd = 3\nstate_diagonal = [0.5, 0.3, 0.2]\n\
             [source]\nkind = \"bernoulli\"\nprobabilities = [0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1]\n",
        )
        .unwrap();
        assert_eq!(weyl.build().unwrap().model.alphabet_size(), 9);
    }

    #[test]
    fn explicit_model_and_povm() {
        let text = r#"
[model]
preset = "explicit"
unitaries = [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]]
[source]
kind = "bernoulli"
probabilities = [1.0]
[run]
povm = "explicit"
povm_elements = [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]], [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]]
"#;
        let sc = ScenarioConfig::parse(text).unwrap().build().unwrap();
        assert_eq!(sc.povm.unwrap().len(), 2);
    }
}
