use super::collision::{run_collision_distinguisher, DistinguisherParams, Verdict};
use super::oracle::{MeasurementOracle, OracleSource};
use crate::error::{out_of_range, Result};
use crate::seed::RandomSeed;
use crate::stats::WilsonInterval;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A non-adaptive test run against one oracle instance.
pub trait OracleTest: Sync {
    fn accepts(&self, oracle: &mut dyn MeasurementOracle, seed: RandomSeed) -> Result<bool>;
}

/// Accepts when the collision distinguisher says "Haar".
#[derive(Debug, Clone, Copy)]
pub struct CollisionTest(pub DistinguisherParams);

impl OracleTest for CollisionTest {
    fn accepts(&self, oracle: &mut dyn MeasurementOracle, seed: RandomSeed) -> Result<bool> {
        Ok(run_collision_distinguisher(oracle, &self.0, seed)?.verdict == Verdict::Haar)
    }
}

/// One measurement; accepts iff the outcome lies in `accept`.
#[derive(Debug, Clone)]
pub struct SingleShotTest {
    pub accept: Vec<u64>,
}

impl OracleTest for SingleShotTest {
    fn accepts(&self, oracle: &mut dyn MeasurementOracle, _seed: RandomSeed) -> Result<bool> {
        let x = oracle.measure()?;
        Ok(self.accept.contains(&x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvantageReport {
    pub accept_a: WilsonInterval,
    pub accept_b: WilsonInterval,
    pub advantage: f64,
    /// Sum of the two 95% Wilson half-widths.
    pub half_width: f64,
    pub trials: u64,
}

/// Acceptance count over `trials` fresh hidden unitaries; trial `i` uses
/// seed `seed.derive(i)` regardless of scheduling.
pub fn acceptance_count(source: &dyn OracleSource, test: &dyn OracleTest, trials: u64, seed: RandomSeed) -> Result<u64> {
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let trial = seed.derive(i);
            let mut oracle = source.instantiate(trial.fork("oracle"))?;
            test.accepts(oracle.as_mut(), trial.fork("test"))
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(outcomes.into_iter().filter(|&a| a).count() as u64)
}

pub fn estimate_advantage(
    ens_a: &dyn OracleSource,
    ens_b: &dyn OracleSource,
    test: &dyn OracleTest,
    trials: u64,
    seed: RandomSeed,
) -> Result<AdvantageReport> {
    if trials == 0 {
        return Err(out_of_range("trials", trials, ">= 1"));
    }
    let a = acceptance_count(ens_a, test, trials, seed.fork("ensemble-a"))?;
    let b = acceptance_count(ens_b, test, trials, seed.fork("ensemble-b"))?;
    let accept_a = WilsonInterval::at_95(a, trials);
    let accept_b = WilsonInterval::at_95(b, trials);
    Ok(AdvantageReport {
        accept_a,
        accept_b,
        advantage: (accept_a.estimate - accept_b.estimate).abs(),
        half_width: accept_a.half_width() + accept_b.half_width(),
        trials,
    })
}
