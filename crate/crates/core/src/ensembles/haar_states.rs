use crate::budget::MemoryBudget;
use crate::error::{out_of_range, Error, Result};
use crate::linalg::haar_state;
use crate::seed::{RandomSeed, SeededRng};
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;
use std::collections::HashMap;

pub const DENSE_STATE_MAX_DIM: usize = 1 << 22;

/// Outcome probabilities `|⟨x|ψ⟩|²` of one Haar-random state.
pub fn haar_state_probabilities(d: usize, seed: RandomSeed, budget: &MemoryBudget) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    if d > DENSE_STATE_MAX_DIM {
        return Err(out_of_range("dense state dimension", d, "<= 2^22"));
    }
    budget.check("dense Haar state", d as u128, 16 + 8)?;
    let psi = haar_state(d, &mut seed.rng())?;
    Ok(psi.iter().map(|a| a.norm_sqr()).collect())
}

/// Measures copies of one hidden Haar state, drawn once at construction.
pub struct DenseStateSampler {
    dist: WeightedIndex<f64>,
    rng: SeededRng,
}

impl DenseStateSampler {
    pub fn new(d: usize, seed: RandomSeed, budget: &MemoryBudget) -> Result<Self> {
        let probs = haar_state_probabilities(d, seed.fork("state"), budget)?;
        let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(DenseStateSampler { dist, rng: seed.fork("shots").rng() })
    }

    pub fn draw(&mut self) -> u64 {
        self.dist.sample(&mut self.rng) as u64
    }
}

pub fn haar_state_measure_dense(d: usize, shots: usize, seed: RandomSeed) -> Result<Vec<u64>> {
    haar_state_measure_dense_with(d, shots, seed, &MemoryBudget::default())
}

pub fn haar_state_measure_dense_with(d: usize, shots: usize, seed: RandomSeed, budget: &MemoryBudget) -> Result<Vec<u64>> {
    let mut s = DenseStateSampler::new(d, seed, budget)?;
    Ok((0..shots).map(|_| s.draw()).collect())
}

/// Pólya urn over `d` colors started from one ball of each color.
///
/// The outcome probabilities of a Haar state are flat-Dirichlet, and i.i.d.
/// draws from a flat-Dirichlet categorical marginalize to this urn: after `N`
/// draws, repeat a uniformly chosen earlier draw with probability `N/(N+d)`,
/// otherwise draw a uniform color. Each draw costs `O(1)` regardless of `d`.
pub struct PolyaUrn {
    d: u64,
    history: Vec<u64>,
    rng: SeededRng,
}

impl PolyaUrn {
    pub fn new(d: u64, seed: RandomSeed) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(PolyaUrn { d, history: Vec::new(), rng: seed.rng() })
    }

    pub fn draw(&mut self) -> u64 {
        let drawn = self.history.len() as u64;
        let label = if self.rng.random_range(0..drawn + self.d) < drawn {
            self.history[self.rng.random_range(0..self.history.len())]
        } else {
            self.rng.random_range(0..self.d)
        };
        self.history.push(label);
        label
    }
}

pub fn haar_collision_polya(d: u64, shots: usize, seed: RandomSeed) -> Result<Vec<u64>> {
    let mut urn = PolyaUrn::new(d, seed)?;
    Ok((0..shots).map(|_| urn.draw()).collect())
}

/// Probability that `shots` draws from a flat-Dirichlet categorical over `d`
/// outcomes show exactly the equality pattern of `labels`, by the urn product
/// `Π (n_i + 1)/(N + d)` for repeats and `(d − b)/(N + d)` for new blocks.
pub fn pattern_probability(d: u64, labels: &[u64]) -> f64 {
    let d = d as f64;
    let mut sizes: HashMap<u64, f64> = HashMap::new();
    let mut p = 1.0;
    for (drawn, label) in labels.iter().enumerate() {
        let denom = drawn as f64 + d;
        match sizes.get_mut(label) {
            Some(count) => {
                p *= (*count + 1.0) / denom;
                *count += 1.0;
            }
            None => {
                p *= (d - sizes.len() as f64) / denom;
                sizes.insert(*label, 1.0);
            }
        }
    }
    p
}
