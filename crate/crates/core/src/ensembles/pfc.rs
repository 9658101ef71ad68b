use crate::budget::MemoryBudget;
use crate::error::{out_of_range, Error, Result};
use crate::linalg::{CMatrix, UnitaryMatrix, C64};
use crate::seed::{RandomSeed, SeededRng};
use crate::stabilizer::{clifford_unitary, measurement_support, random_clifford, AffineSupport, Tableau};
use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use std::borrow::Cow;
use std::f64::consts::TAU;

pub const PFC_MAX_QUBITS: usize = 30;
pub const PFC_DENSE_MAX_QUBITS: usize = 12;

/// Diagonal phase `x ↦ ω^{f(x)}` with `ω = e^{2πi/order}`, where `f` is a
/// keyed counter-mode ChaCha20 stream read at word offset `2x`. Nothing of
/// size `2^n` is stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseFunction {
    key: [u8; 32],
    order: u32,
}

impl PhaseFunction {
    pub fn new(seed: RandomSeed, order: u32) -> Result<Self> {
        if order < 2 {
            return Err(out_of_range("phase order", order, ">= 2"));
        }
        let mut key = [0u8; 32];
        seed.rng().fill_bytes(&mut key);
        Ok(PhaseFunction { key, order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `f(x) ∈ [0, order)`.
    pub fn exponent(&self, x: u64) -> u32 {
        let mut stream = SeededRng::from_seed(self.key);
        stream.set_word_pos(2 * u128::from(x));
        (stream.next_u64() % u64::from(self.order)) as u32
    }

    pub fn value(&self, x: u64) -> C64 {
        let k = self.exponent(x);
        match (self.order, k) {
            (_, 0) => C64::new(1.0, 0.0),
            (2, _) => C64::new(-1.0, 0.0),
            _ => C64::from_polar(1.0, TAU * f64::from(k) / f64::from(self.order)),
        }
    }
}

/// One draw `P · F · C` from the PFC ensemble on `n` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfcSample {
    n: usize,
    perm: Vec<u32>,
    phase: PhaseFunction,
    clifford: Tableau,
}

/// Uniform permutation, uniform ±1 phases, uniform Clifford.
pub fn sample_pfc(n: usize, seed: RandomSeed) -> Result<PfcSample> {
    sample_pfc_with(n, seed, 2, &MemoryBudget::default())
}

pub fn sample_pfc_with(n: usize, seed: RandomSeed, phase_order: u32, budget: &MemoryBudget) -> Result<PfcSample> {
    if !(1..=PFC_MAX_QUBITS).contains(&n) {
        return Err(out_of_range("PFC qubit count", n, "1..=30"));
    }
    budget.check("PFC permutation", 1u128 << n, 4)?;
    let mut perm: Vec<u32> = (0..1u32 << n).collect();
    perm.shuffle(&mut seed.fork("permutation").rng());
    let phase = PhaseFunction::new(seed.fork("phase"), phase_order)?;
    let clifford = random_clifford(n, seed.fork("clifford"))?;
    Ok(PfcSample { n, perm, phase, clifford })
}

impl PfcSample {
    pub fn from_parts(perm: Vec<u32>, phase: PhaseFunction, clifford: Tableau) -> Result<Self> {
        let n = clifford.n();
        if n > PFC_MAX_QUBITS {
            return Err(out_of_range("PFC qubit count", n, "1..=30"));
        }
        if perm.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, found: perm.len() });
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            let slot = seen
                .get_mut(p as usize)
                .ok_or_else(|| Error::InvalidArgument("permutation entry out of range".into()))?;
            if std::mem::replace(slot, true) {
                return Err(Error::InvalidArgument("permutation repeats an entry".into()));
            }
        }
        Ok(PfcSample { n, perm, phase, clifford })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn permutation(&self) -> &[u32] {
        &self.perm
    }

    pub fn phase(&self) -> &PhaseFunction {
        &self.phase
    }

    pub fn clifford(&self) -> &Tableau {
        &self.clifford
    }

    /// Dense `P·F·C`: row `perm[x]` is `ω^{f(x)}` times row `x` of `C`.
    pub fn dense(&self) -> Result<UnitaryMatrix> {
        if self.n > PFC_DENSE_MAX_QUBITS {
            return Err(out_of_range("PFC qubit count for dense form", self.n, "<= 12"));
        }
        let c = clifford_unitary(&self.clifford)?;
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for x in 0..dim {
            let w = self.phase.value(x as u64);
            let row = c.matrix().row(x) * w;
            m.set_row(self.perm[x] as usize, &row);
        }
        Ok(UnitaryMatrix::from_trusted(m))
    }

    /// Stateful sampler of computational-basis outcomes of `PFC|0ⁿ⟩`.
    pub fn measurement_sampler(&self, seed: RandomSeed) -> PfcMeasurement<'_> {
        PfcMeasurement {
            support: measurement_support(&self.clifford),
            perm: Cow::Borrowed(&self.perm),
            rng: seed.rng(),
        }
    }

    pub fn into_measurement_sampler(self, seed: RandomSeed) -> PfcMeasurement<'static> {
        PfcMeasurement {
            support: measurement_support(&self.clifford),
            perm: Cow::Owned(self.perm),
            rng: seed.rng(),
        }
    }
}

/// Draws outcomes of `C|0ⁿ⟩` from its affine support and relabels them by `P`;
/// the phase `F` has no effect on computational-basis probabilities.
pub struct PfcMeasurement<'a> {
    support: AffineSupport,
    perm: Cow<'a, [u32]>,
    rng: SeededRng,
}

impl PfcMeasurement<'_> {
    pub fn support(&self) -> &AffineSupport {
        &self.support
    }

    pub fn draw(&mut self) -> u64 {
        u64::from(self.perm[self.support.sample(&mut self.rng) as usize])
    }
}

pub fn pfc_measure_zero_state(s: &PfcSample, shots: usize, seed: RandomSeed) -> Vec<u64> {
    let mut sampler = s.measurement_sampler(seed);
    (0..shots).map(|_| sampler.draw()).collect()
}
