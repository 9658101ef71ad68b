//! Dispatch from parsed arguments to the library, producing JSON results.

use crate::args::{Estimator, Experiment, Formula, Reference};
use crate::error::CliError;
use prubench::bounds::{
    improved_support_bound, prior_support_branches, rom_input_length_bounds, trivial_rompru_params, LogReal,
};
use prubench::distinguisher::{
    estimate_advantage, BlockEstimator, CollisionTest, DistinguisherParams, HaarUrnSource, PfcSource,
};
use prubench::ensembles::{clifford_group, pauli_group, EnsembleSpec, FiniteEnsemble};
use prubench::linalg::{diamond_distance_unitaries, haar_unitary};
use prubench::moments::diamond_design_bounds;
use prubench::nets::{exposure_estimate, net_size_lower_bound, NetSpec};
use prubench::tomography::{naive_process_tomography, planned_queries, ChannelOracle};
use prubench::truncation::{
    circuit_truncation_bound, diag_truncation_distance, equivalent_binary_input_length, DiagonalOracleCircuit,
    MAX_EXACT_BITS,
};
use prubench::{MemoryBudget, RandomSeed};
use serde_json::{json, Value};

/// Largest qubit count for the urn and stabilizer fast paths.
const MAX_PFC_QUBITS: u32 = 30;
/// Below this dimension the collision test's guarantees are far from their
/// asymptotic regime.
const SMALL_DIM_WARNING: u64 = 64;
/// Largest dimension the tomography demo is validated at.
const TOMOGRAPHY_TESTED_DIM: usize = 8;

const DEFAULT_TRIALS: u64 = 200;
const DEFAULT_GENERATED_DRAWS: usize = 64;
const DEFAULT_COVERAGE_SAMPLES: u64 = 10_000;

#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Value,
    pub warnings: Vec<String>,
    pub violations: Vec<String>,
}

pub fn execute(exp: &Experiment, seed: Option<u64>, budget: &MemoryBudget) -> Result<Outcome, CliError> {
    let seed = match (seed, exp.is_stochastic()) {
        (Some(s), _) => RandomSeed::new(s),
        (None, true) => return Err(CliError::Usage(format!("{} needs --seed", exp.name()))),
        (None, false) => RandomSeed::new(0),
    };
    match exp {
        Experiment::PfcDistinguish(a) => {
            if a.n == 0 || a.n > MAX_PFC_QUBITS {
                return Err(CliError::Usage(format!("n = {} must lie in 1..={MAX_PFC_QUBITS}", a.n)));
            }
            let d = 1u64 << a.n;
            let mut out = Outcome::default();
            if d < SMALL_DIM_WARNING {
                out.warnings.push(format!(
                    "d = {d} is small; the acceptance guarantees of the collision test are asymptotic in d"
                ));
            }
            let k_blocks = a.k_blocks.unwrap_or(DistinguisherParams::TEST_BLOCKS);
            let standard = DistinguisherParams::standard(d, k_blocks)?;
            let params = DistinguisherParams::new(
                d,
                a.t.unwrap_or(standard.t),
                k_blocks,
                a.alpha.unwrap_or(DistinguisherParams::DEFAULT_ALPHA),
            )?
            .with_estimator(match a.estimator.unwrap_or(Estimator::Mean) {
                Estimator::Mean => BlockEstimator::Mean,
                Estimator::Median => BlockEstimator::Median,
            });
            let trials = a.trials.unwrap_or(DEFAULT_TRIALS);
            let report = estimate_advantage(
                &PfcSource { qubits: a.n as usize },
                &HaarUrnSource { d },
                &CollisionTest(params),
                trials,
                seed,
            )?;
            if let Some(min) = a.min_advantage {
                if report.advantage < min {
                    out.violations.push(format!("advantage {:.4} < required {min}", report.advantage));
                }
            }
            out.result = json!({
                "d": d,
                "params": params,
                "trials": trials,
                "pfc_side_pfc_rate": 1.0 - report.accept_a.estimate,
                "haar_side_haar_rate": report.accept_b.estimate,
                "pfc_accept": report.accept_a,
                "haar_accept": report.accept_b,
                "advantage": report.advantage,
                "half_width": report.half_width,
            });
            Ok(out)
        }
        Experiment::DesignDistance(a) => {
            let (ensemble, source) = match (&a.ensemble, a.reference) {
                (_, Some(r)) => (reference(r)?, format!("{r:?}").to_lowercase()),
                (Some(path), None) => {
                    let ens = match EnsembleSpec::load(path)? {
                        EnsembleSpec::Finite(e) => e,
                        EnsembleSpec::Generated { generator, seed } => {
                            generator.materialize(a.samples.unwrap_or(DEFAULT_GENERATED_DRAWS), seed)?
                        }
                    };
                    (ens, path.display().to_string())
                }
                (None, None) => return Err(CliError::Usage("design-distance needs --ensemble or --reference".into())),
            };
            let report = diamond_design_bounds(&ensemble, a.t, budget)?;
            let mut out = Outcome::default();
            if let Some(max) = a.max_lambda {
                if report.lambda_tpe > max {
                    out.violations.push(format!("TPE distance {:.3e} > allowed {max}", report.lambda_tpe));
                }
            }
            out.result = json!({ "ensemble": source, "size": ensemble.len(), "report": report });
            Ok(out)
        }
        Experiment::NetCoverage(a) => {
            let net = NetSpec::load(&a.net)?;
            let samples = a.samples.unwrap_or(DEFAULT_COVERAGE_SAMPLES);
            let report = exposure_estimate(&net, a.eps, samples, seed)?;
            let result = json!({ "d": net.dim(), "net_size": net.len(), "coverage": report });
            Ok(Outcome { result, ..Outcome::default() })
        }
        Experiment::TruncateDiag(a) => {
            let circuit = DiagonalOracleCircuit::load(&a.circuit)?;
            let mut out = Outcome::default();
            let mut per_oracle = Vec::new();
            for (i, oracle) in circuit.oracles().iter().enumerate() {
                if oracle.m() > MAX_EXACT_BITS {
                    per_oracle.push(Value::Null);
                    continue;
                }
                let check = diag_truncation_distance(oracle, a.k)?;
                if !check.holds {
                    out.violations.push(format!("oracle {i}: distance {} > {}", check.distance, check.bound));
                }
                per_oracle.push(serde_json::to_value(check)?);
            }
            let whole = circuit_truncation_bound(&circuit, a.k, budget)?;
            if !whole.holds {
                out.violations.push(format!("circuit: distance {} > {}", whole.distance, whole.bound));
            }
            out.result = json!({
                "qubits": circuit.qubits(),
                "calls": circuit.calls(),
                "k": a.k,
                "circuit": whole,
                "oracles": per_oracle,
            });
            Ok(out)
        }
        Experiment::Bounds { formula } => Ok(Outcome { result: bound(formula)?, ..Outcome::default() }),
        Experiment::TomoDemo(a) => {
            let mut out = Outcome::default();
            if a.d > TOMOGRAPHY_TESTED_DIM {
                out.warnings.push(format!("d = {} is beyond the validated range d <= {TOMOGRAPHY_TESTED_DIM}", a.d));
            }
            let hidden = haar_unitary(a.d, seed.fork("hidden"))?;
            let mut oracle = ChannelOracle::new(hidden.clone());
            let estimate = naive_process_tomography(&mut oracle, a.eps, a.eta, seed.fork("tomography"))?;
            let distance = diamond_distance_unitaries(&estimate.u_hat, &hidden)?;
            let planned = if a.eps >= 2.0 || a.d == 1 { 0 } else { planned_queries(a.d, a.eps, a.eta)? };
            if estimate.queries_used != planned || oracle.queries() != planned {
                out.violations.push(format!(
                    "query counter {} / reported {} differ from planned {planned}",
                    oracle.queries(),
                    estimate.queries_used
                ));
            }
            out.result = json!({
                "d": a.d,
                "epsilon": a.eps,
                "eta": a.eta,
                "distance": distance,
                "within_epsilon": distance <= a.eps,
                "queries_used": estimate.queries_used,
                "planned_queries": planned,
                "settings": estimate.settings,
                "shots_per_setting": estimate.shots_per_setting,
            });
            Ok(out)
        }
    }
}

fn reference(r: Reference) -> prubench::Result<FiniteEnsemble> {
    match r {
        Reference::Pauli1 => pauli_group(1),
        Reference::Pauli2 => pauli_group(2),
        Reference::Clifford1 => clifford_group(1),
    }
}

fn log_value(x: LogReal) -> Value {
    json!({ "value": x.value(), "log2": x.log2() })
}

fn bound(formula: &Formula) -> Result<Value, CliError> {
    Ok(match *formula {
        Formula::PriorSupport { d, t, delta } => {
            let b = prior_support_branches(d, t, delta)?;
            json!({
                "bound": log_value(b.bound()),
                "symmetric_branch": log_value(b.symmetric_branch),
                "tensor_branch": log_value(b.tensor_branch),
            })
        }
        Formula::ImprovedSupport { d, t, delta, c_design } => {
            json!({ "bound": log_value(improved_support_bound(d, t, delta, c_design)?) })
        }
        Formula::InputLength { d, t, delta, epsilon, slack } => {
            serde_json::to_value(rom_input_length_bounds(d, t, delta, epsilon, slack)?)?
        }
        Formula::TrivialRompru { d, kappa } => serde_json::to_value(trivial_rompru_params(d, kappa)?)?,
        Formula::NetSize { d, epsilon, eta, c_diamond } => {
            json!({ "bound": net_size_lower_bound(d, epsilon, eta, c_diamond)? })
        }
        Formula::BinaryInputLength { m, calls, epsilon, c } => {
            json!({ "input_bits": equivalent_binary_input_length(m, calls, epsilon, c)? })
        }
    })
}
