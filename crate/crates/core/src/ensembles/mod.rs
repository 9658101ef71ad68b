//! Unitary ensembles: the PFC construction, Haar-state measurement samplers,
//! and finite reference designs.

mod haar_states;
mod pfc;
mod reference;

pub use haar_states::{
    haar_collision_polya, haar_state_measure_dense, haar_state_measure_dense_with, haar_state_probabilities,
    pattern_probability, DenseStateSampler, PolyaUrn, DENSE_STATE_MAX_DIM,
};
pub use pfc::{
    pfc_measure_zero_state, sample_pfc, sample_pfc_with, PfcMeasurement, PfcSample, PhaseFunction, PFC_DENSE_MAX_QUBITS,
    PFC_MAX_QUBITS,
};
pub use reference::{clifford_group, pauli_group, reference_design, ReferenceDesign};

use crate::error::{out_of_range, Error, Result};
use crate::linalg::{haar_unitary, io, UnitaryMatrix};
use crate::seed::RandomSeed;
use crate::stabilizer::{clifford_unitary, random_clifford};
use rand::distr::{weighted::WeightedIndex, Distribution};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const WEIGHT_TOL: f64 = 1e-12;

/// A finitely supported distribution over `U(d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteEnsemble {
    dim: usize,
    unitaries: Vec<UnitaryMatrix>,
    weights: Vec<f64>,
}

impl FiniteEnsemble {
    pub fn new(unitaries: Vec<UnitaryMatrix>, weights: Vec<f64>) -> Result<Self> {
        let dim = unitaries.first().ok_or(Error::EmptyNet)?.dim();
        if weights.len() != unitaries.len() {
            return Err(Error::DimensionMismatch { expected: unitaries.len(), found: weights.len() });
        }
        if let Some(u) = unitaries.iter().find(|u| u.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: u.dim() });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(out_of_range("total weight", total, "1 within 1e-12"));
        }
        Ok(FiniteEnsemble { dim, unitaries, weights })
    }

    pub fn uniform(unitaries: Vec<UnitaryMatrix>) -> Result<Self> {
        let w = 1.0 / unitaries.len().max(1) as f64;
        let weights = vec![w; unitaries.len()];
        Self::new(unitaries, weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn unitaries(&self) -> &[UnitaryMatrix] {
        &self.unitaries
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&UnitaryMatrix, f64)> {
        self.unitaries.iter().zip(self.weights.iter().copied())
    }

    pub fn draw(&self, seed: RandomSeed) -> &UnitaryMatrix {
        let dist = WeightedIndex::new(&self.weights).expect("weights validated at construction");
        &self.unitaries[dist.sample(&mut seed.rng())]
    }

    /// The ensemble of adjoints `U†`, same weights.
    pub fn adjoint(&self) -> Self {
        FiniteEnsemble {
            dim: self.dim,
            unitaries: self.unitaries.iter().map(UnitaryMatrix::adjoint).collect(),
            weights: self.weights.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Generator {
    Haar { dim: usize },
    Clifford { qubits: usize },
    Pfc { qubits: usize },
}

impl Generator {
    pub fn dim(&self) -> usize {
        match *self {
            Generator::Haar { dim } => dim,
            Generator::Clifford { qubits } | Generator::Pfc { qubits } => 1 << qubits.min(63),
        }
    }

    pub fn draw(&self, seed: RandomSeed) -> Result<UnitaryMatrix> {
        match *self {
            Generator::Haar { dim } => haar_unitary(dim, seed),
            Generator::Clifford { qubits } => clifford_unitary(&random_clifford(qubits, seed)?),
            Generator::Pfc { qubits } => sample_pfc(qubits, seed)?.dense(),
        }
    }

    /// `count` i.i.d. draws as a uniform finite ensemble.
    pub fn materialize(&self, count: usize, seed: RandomSeed) -> Result<FiniteEnsemble> {
        let draws = (0..count as u64).map(|i| self.draw(seed.derive(i))).collect::<Result<Vec<_>>>()?;
        FiniteEnsemble::uniform(draws)
    }
}

/// Either an explicit weighted list or a seeded sampler.
#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleSpec {
    Finite(FiniteEnsemble),
    Generated { generator: Generator, seed: RandomSeed },
}

impl EnsembleSpec {
    pub fn dim(&self) -> usize {
        match self {
            EnsembleSpec::Finite(e) => e.dim(),
            EnsembleSpec::Generated { generator, .. } => generator.dim(),
        }
    }

    /// The `index`-th reproducible draw.
    pub fn draw(&self, index: u64) -> Result<UnitaryMatrix> {
        match self {
            EnsembleSpec::Finite(e) => Ok(e.draw(RandomSeed::new(index).fork("finite-ensemble")).clone()),
            EnsembleSpec::Generated { generator, seed } => generator.draw(seed.derive(index)),
        }
    }

    /// Loads a JSON manifest. Matrix file references are resolved relative
    /// to the manifest's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let manifest: EnsembleManifest = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
        let base = path.parent().unwrap_or(Path::new("."));
        manifest.resolve(base)
    }

    /// Writes a manifest; finite ensembles also write one matrix file per
    /// element next to it, named `<stem>-<i>.json`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let base = path.parent().unwrap_or(Path::new("."));
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("ensemble");
        let manifest = match self {
            EnsembleSpec::Finite(e) => {
                let mut refs = Vec::with_capacity(e.len());
                for (i, u) in e.unitaries().iter().enumerate() {
                    let name = format!("{stem}-{i}.json");
                    io::save_json(u.matrix(), &base.join(&name))?;
                    refs.push(name);
                }
                EnsembleManifest {
                    dim: e.dim(),
                    weights: Some(e.weights().to_vec()),
                    matrices: Some(refs),
                    generator: None,
                    seed: None,
                }
            }
            EnsembleSpec::Generated { generator, seed } => EnsembleManifest {
                dim: generator.dim(),
                weights: None,
                matrices: None,
                generator: Some(*generator),
                seed: Some(*seed),
            },
        };
        serde_json::to_writer_pretty(std::io::BufWriter::new(std::fs::File::create(path)?), &manifest)?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleManifest {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrices: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<Generator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<RandomSeed>,
}

impl EnsembleManifest {
    fn resolve(self, base: &Path) -> Result<EnsembleSpec> {
        let spec = match (self.matrices, self.generator) {
            (Some(refs), None) => {
                let unitaries = refs
                    .iter()
                    .map(|r| UnitaryMatrix::new(io::load_json(&base.join(r))?))
                    .collect::<Result<Vec<_>>>()?;
                let ensemble = match self.weights {
                    Some(w) => FiniteEnsemble::new(unitaries, w)?,
                    None => FiniteEnsemble::uniform(unitaries)?,
                };
                EnsembleSpec::Finite(ensemble)
            }
            (None, Some(generator)) => EnsembleSpec::Generated { generator, seed: self.seed.unwrap_or_default() },
            _ => {
                return Err(Error::InvalidArgument(
                    "manifest needs exactly one of `matrices` or `generator`".into(),
                ))
            }
        };
        if spec.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: spec.dim() });
        }
        Ok(spec)
    }
}
