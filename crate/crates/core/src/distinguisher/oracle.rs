use crate::budget::MemoryBudget;
use crate::ensembles::{sample_pfc, DenseStateSampler, FiniteEnsemble, PfcMeasurement, PolyaUrn};
use crate::error::{Error, Result};
use crate::seed::{RandomSeed, SeededRng};
use rand::distr::{weighted::WeightedIndex, Distribution};

/// Computational-basis measurements of copies of `U|0⟩` for one hidden `U`.
pub trait MeasurementOracle {
    fn dim(&self) -> u64;
    fn measure(&mut self) -> Result<u64>;
}

pub type BoxedOracle = Box<dyn MeasurementOracle + Send>;

impl MeasurementOracle for PfcMeasurement<'_> {
    fn dim(&self) -> u64 {
        1 << self.support().n()
    }

    fn measure(&mut self) -> Result<u64> {
        Ok(self.draw())
    }
}

/// Haar-state oracle on a dimension only known through its label range.
pub struct UrnOracle {
    d: u64,
    urn: PolyaUrn,
}

impl UrnOracle {
    pub fn new(d: u64, seed: RandomSeed) -> Result<Self> {
        Ok(UrnOracle { d, urn: PolyaUrn::new(d, seed)? })
    }
}

impl MeasurementOracle for UrnOracle {
    fn dim(&self) -> u64 {
        self.d
    }

    fn measure(&mut self) -> Result<u64> {
        Ok(self.urn.draw())
    }
}

pub struct DenseHaarOracle {
    d: u64,
    sampler: DenseStateSampler,
}

impl DenseHaarOracle {
    pub fn new(d: usize, seed: RandomSeed, budget: &MemoryBudget) -> Result<Self> {
        Ok(DenseHaarOracle { d: d as u64, sampler: DenseStateSampler::new(d, seed, budget)? })
    }
}

impl MeasurementOracle for DenseHaarOracle {
    fn dim(&self) -> u64 {
        self.d
    }

    fn measure(&mut self) -> Result<u64> {
        Ok(self.sampler.draw())
    }
}

/// Replays a fixed list of outcomes, then reports exhaustion.
pub struct ListOracle {
    d: u64,
    outcomes: Vec<u64>,
    next: usize,
}

impl ListOracle {
    pub fn new(d: u64, outcomes: Vec<u64>) -> Self {
        ListOracle { d, outcomes, next: 0 }
    }
}

impl MeasurementOracle for ListOracle {
    fn dim(&self) -> u64 {
        self.d
    }

    fn measure(&mut self) -> Result<u64> {
        let x = *self.outcomes.get(self.next).ok_or(Error::OracleExhausted(self.next as u64))?;
        self.next += 1;
        Ok(x)
    }
}

/// Measures `U|0⟩` for a fixed dense unitary.
pub struct UnitaryOracle {
    d: u64,
    dist: WeightedIndex<f64>,
    rng: SeededRng,
}

impl UnitaryOracle {
    pub fn new(u: &crate::linalg::UnitaryMatrix, seed: RandomSeed) -> Result<Self> {
        let probs: Vec<f64> = u.matrix().column(0).iter().map(|a| a.norm_sqr()).collect();
        let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(UnitaryOracle { d: u.dim() as u64, dist, rng: seed.rng() })
    }
}

impl MeasurementOracle for UnitaryOracle {
    fn dim(&self) -> u64 {
        self.d
    }

    fn measure(&mut self) -> Result<u64> {
        Ok(self.dist.sample(&mut self.rng) as u64)
    }
}

/// A distribution over hidden unitaries: each call draws a fresh one.
pub trait OracleSource: Sync {
    fn dim(&self) -> u64;
    fn instantiate(&self, seed: RandomSeed) -> Result<BoxedOracle>;
}

/// Haar-random hidden state, measured through the Pólya urn.
#[derive(Debug, Clone, Copy)]
pub struct HaarUrnSource {
    pub d: u64,
}

impl OracleSource for HaarUrnSource {
    fn dim(&self) -> u64 {
        self.d
    }

    fn instantiate(&self, seed: RandomSeed) -> Result<BoxedOracle> {
        Ok(Box::new(UrnOracle::new(self.d, seed)?))
    }
}

/// Haar-random hidden state, sampled densely.
#[derive(Debug, Clone, Copy)]
pub struct HaarDenseSource {
    pub d: usize,
    pub budget: MemoryBudget,
}

impl OracleSource for HaarDenseSource {
    fn dim(&self) -> u64 {
        self.d as u64
    }

    fn instantiate(&self, seed: RandomSeed) -> Result<BoxedOracle> {
        Ok(Box::new(DenseHaarOracle::new(self.d, seed, &self.budget)?))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PfcSource {
    pub qubits: usize,
}

impl OracleSource for PfcSource {
    fn dim(&self) -> u64 {
        1 << self.qubits
    }

    fn instantiate(&self, seed: RandomSeed) -> Result<BoxedOracle> {
        let sample = sample_pfc(self.qubits, seed.fork("unitary"))?;
        Ok(Box::new(sample.into_measurement_sampler(seed.fork("shots"))))
    }
}

impl OracleSource for FiniteEnsemble {
    fn dim(&self) -> u64 {
        FiniteEnsemble::dim(self) as u64
    }

    fn instantiate(&self, seed: RandomSeed) -> Result<BoxedOracle> {
        let u = self.draw(seed.fork("unitary"));
        Ok(Box::new(UnitaryOracle::new(u, seed.fork("shots"))?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_oracle_exhausts() {
        let mut o = ListOracle::new(4, vec![1, 2]);
        assert_eq!(o.measure().unwrap(), 1);
        assert_eq!(o.measure().unwrap(), 2);
        assert!(matches!(o.measure(), Err(Error::OracleExhausted(2))));
    }

    #[test]
    fn sources_report_dimensions_and_reproduce() {
        let pfc = PfcSource { qubits: 5 };
        assert_eq!(OracleSource::dim(&pfc), 32);
        let draw = |s: &dyn OracleSource| {
            let mut o = s.instantiate(RandomSeed::new(2)).unwrap();
            (0..20).map(|_| o.measure().unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(&pfc), draw(&pfc));
        let urn = HaarUrnSource { d: 1 << 20 };
        assert_eq!(draw(&urn), draw(&urn));
        let dense = HaarDenseSource { d: 64, budget: MemoryBudget::default() };
        assert!(draw(&dense).iter().all(|&x| x < 64));
    }
}
