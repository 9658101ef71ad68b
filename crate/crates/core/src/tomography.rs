//! Query-counted access to an unknown unitary and a plain Choi-state
//! tomography that meets a requested `(ε, η)` accuracy contract.

use crate::error::{out_of_range, Error, Result};
use crate::linalg::{nearest_unitary, CMatrix, CVector, UnitaryMatrix, C64};
use crate::seed::RandomSeed;
use crate::stabilizer::Pauli;
use nalgebra::SymmetricEigen;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

/// Largest dimension the tomography accepts (`3^{2·log₂ d}` settings).
pub const MAX_TOMOGRAPHY_DIM: usize = 16;

/// Measurement axis on one qubit of the probe register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// A non-adaptive batch of probes. Each shot sends half of a maximally
/// entangled `d × d` register through the oracle and measures every qubit of
/// the joint register along the axis given by the setting.
///
/// Register layout: index `a·d + i` for system `a` and reference `i`; qubit
/// `j` is bit `j` of the index, so reference qubits come first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoiProbePlan {
    pub settings: Vec<Vec<PauliAxis>>,
    pub shots_per_setting: u64,
}

impl ChoiProbePlan {
    pub fn total_queries(&self) -> u128 {
        self.settings.len() as u128 * u128::from(self.shots_per_setting)
    }

    /// All `3^q` product settings on `q` qubits, base-3 digit `j` for qubit `j`.
    pub fn all_settings(qubits: u32, shots_per_setting: u64) -> Self {
        let count = 3usize.pow(qubits);
        let settings = (0..count)
            .map(|mut s| {
                (0..qubits)
                    .map(|_| {
                        let axis = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z][s % 3];
                        s /= 3;
                        axis
                    })
                    .collect()
            })
            .collect();
        Self { settings, shots_per_setting }
    }
}

/// Forward-only access to a hidden unitary. Every application increments the
/// query counter, and only one plan may ever be submitted.
#[derive(Debug)]
pub struct ChannelOracle {
    hidden: UnitaryMatrix,
    queries: u64,
    query_cap: u64,
    plan_submitted: bool,
}

impl ChannelOracle {
    pub fn new(hidden: UnitaryMatrix) -> Self {
        Self { hidden, queries: 0, query_cap: u64::MAX, plan_submitted: false }
    }

    pub fn with_query_cap(mut self, cap: u64) -> Self {
        self.query_cap = cap;
        self
    }

    pub fn dim(&self) -> usize {
        self.hidden.dim()
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Runs the whole plan and returns outcome counts per setting.
    pub fn run_plan(&mut self, plan: &ChoiProbePlan, seed: RandomSeed) -> Result<Vec<Vec<u64>>> {
        if self.plan_submitted {
            return Err(Error::AdaptiveQuery);
        }
        let d = self.dim();
        let qubits = register_qubits(d)?;
        if let Some(bad) = plan.settings.iter().find(|s| s.len() != qubits as usize) {
            return Err(Error::DimensionMismatch { expected: qubits as usize, found: bad.len() });
        }
        let requested = plan.total_queries();
        if requested > u128::from(self.query_cap - self.queries) {
            return Err(Error::BudgetExceeded { what: "oracle queries", requested, budget: self.query_cap });
        }
        self.plan_submitted = true;
        let state = choi_vector(&self.hidden);
        let mut rng = seed.rng();
        let mut counts = Vec::with_capacity(plan.settings.len());
        for setting in &plan.settings {
            let probs = setting_probabilities(&state, setting);
            counts.push(multinomial(plan.shots_per_setting, &probs, &mut rng)?);
            self.queries += plan.shots_per_setting;
        }
        Ok(counts)
    }
}

fn register_qubits(d: usize) -> Result<u32> {
    if !d.is_power_of_two() {
        return Err(out_of_range("d", d, "a power of two"));
    }
    if d > MAX_TOMOGRAPHY_DIM {
        return Err(out_of_range("d", d, "<= 16"));
    }
    Ok(2 * d.trailing_zeros())
}

/// `(U ⊗ I)|Φ⟩` with `|Φ⟩ = d^{-1/2} Σ_i |i⟩|i⟩`.
fn choi_vector(u: &UnitaryMatrix) -> CVector {
    let d = u.dim();
    let scale = 1.0 / (d as f64).sqrt();
    CVector::from_fn(d * d, |k, _| u.matrix()[(k / d, k % d)] * scale)
}

fn apply_single_qubit(state: &mut CVector, qubit: u32, g: [[C64; 2]; 2]) {
    let bit = 1usize << qubit;
    for idx in 0..state.len() {
        if idx & bit == 0 {
            let (a, b) = (state[idx], state[idx | bit]);
            state[idx] = g[0][0] * a + g[0][1] * b;
            state[idx | bit] = g[1][0] * a + g[1][1] * b;
        }
    }
}

/// Rotation taking the `+1`/`−1` eigenvectors of the axis to `|0⟩`/`|1⟩`.
fn rotation(axis: PauliAxis) -> Option<[[C64; 2]; 2]> {
    let h = 1.0 / SQRT_2;
    let r = |x: f64| C64::new(x, 0.0);
    match axis {
        PauliAxis::Z => None,
        PauliAxis::X => Some([[r(h), r(h)], [r(h), r(-h)]]),
        // H·S†
        PauliAxis::Y => Some([[r(h), C64::new(0.0, -h)], [r(h), C64::new(0.0, h)]]),
    }
}

fn setting_probabilities(state: &CVector, setting: &[PauliAxis]) -> Vec<f64> {
    let mut rotated = state.clone();
    for (j, &axis) in setting.iter().enumerate() {
        if let Some(g) = rotation(axis) {
            apply_single_qubit(&mut rotated, j as u32, g);
        }
    }
    rotated.iter().map(|z| z.norm_sqr()).collect()
}

fn multinomial<R: Rng + ?Sized>(n: u64, probs: &[f64], rng: &mut R) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = n;
    let mut mass: f64 = probs.iter().sum();
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == probs.len() {
            counts[k] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, q)
            .map_err(|e| Error::InvalidArgument(format!("binomial parameters: {e}")))?
            .sample(rng);
        counts[k] = draw;
        remaining -= draw;
        mass -= p;
    }
    Ok(counts)
}

/// Reconstruction produced by [`naive_process_tomography`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyResult {
    pub u_hat: UnitaryMatrix,
    pub queries_used: u64,
    pub epsilon: f64,
    pub eta: f64,
    pub settings: u64,
    pub shots_per_setting: u64,
}

/// Per-Pauli accuracy `a` that makes the reconstruction `ε`-close:
/// coefficient errors `≤ a` give `‖ρ̂ − ρ‖₂ ≤ d·a`, hence an eigenvector error
/// `≤ 2da`, a reshaped-matrix error `≤ 2√2·d^{3/2}a`, at most twice that
/// after the polar step, and a diamond distance of at most twice the
/// operator-norm error.
fn coefficient_accuracy(d: usize, epsilon: f64) -> f64 {
    epsilon / (8.0 * SQRT_2 * (d as f64).powf(1.5))
}

/// Shots per setting so that, by Hoeffding and a union bound over the
/// `D² − 1` non-identity Pauli coefficients (`D = d²`), every coefficient is
/// within `a` with probability `≥ 1 − η`.
pub fn shots_per_setting(d: usize, epsilon: f64, eta: f64) -> Result<u64> {
    check_contract(epsilon, eta)?;
    let big_d = (d * d) as f64;
    let a = coefficient_accuracy(d, epsilon);
    Ok((2.0 * (2.0 * (big_d * big_d - 1.0) / eta).ln() / (a * a)).ceil() as u64)
}

/// Total queries [`naive_process_tomography`] will spend.
pub fn planned_queries(d: usize, epsilon: f64, eta: f64) -> Result<u64> {
    check_contract(epsilon, eta)?;
    if epsilon >= 2.0 || d == 1 {
        return Ok(0);
    }
    let qubits = register_qubits(d)?;
    let total = 3u128.pow(qubits) * u128::from(shots_per_setting(d, epsilon, eta)?);
    u64::try_from(total).map_err(|_| out_of_range("planned queries", total, "< 2^64"))
}

fn check_contract(epsilon: f64, eta: f64) -> Result<()> {
    if !(epsilon > 0.0) {
        return Err(out_of_range("epsilon", epsilon, "> 0"));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(out_of_range("eta", eta, "(0, 1)"));
    }
    Ok(())
}

/// Estimates every Pauli coefficient of the Choi state from a single
/// non-adaptive plan, inverts linearly, takes the top eigenvector, reshapes
/// and projects to the nearest unitary.
pub fn naive_process_tomography(
    oracle: &mut ChannelOracle,
    epsilon: f64,
    eta: f64,
    seed: RandomSeed,
) -> Result<TomographyResult> {
    check_contract(epsilon, eta)?;
    let d = oracle.dim();
    let qubits = register_qubits(d)?;
    if epsilon >= 2.0 || d == 1 {
        return Ok(TomographyResult {
            u_hat: UnitaryMatrix::identity(d),
            queries_used: 0,
            epsilon,
            eta,
            settings: 0,
            shots_per_setting: 0,
        });
    }
    let shots = shots_per_setting(d, epsilon, eta)?;
    let plan = ChoiProbePlan::all_settings(qubits, shots);
    let before = oracle.queries();
    let counts = oracle.run_plan(&plan, seed)?;
    let rho = reconstruct_choi(qubits, &plan, &counts);
    let eig = SymmetricEigen::new(rho);
    let top = eig.eigenvalues.imax();
    let psi = eig.eigenvectors.column(top);
    let scale = (d as f64).sqrt();
    let raw = CMatrix::from_fn(d, d, |a, i| psi[a * d + i] * scale);
    Ok(TomographyResult {
        u_hat: nearest_unitary(&raw)?,
        queries_used: oracle.queries() - before,
        epsilon,
        eta,
        settings: plan.settings.len() as u64,
        shots_per_setting: shots,
    })
}

/// Linear inversion `ρ̂ = D⁻¹ Σ_P ĉ_P P`, pooling every setting compatible
/// with each Pauli string.
fn reconstruct_choi(qubits: u32, plan: &ChoiProbePlan, counts: &[Vec<u64>]) -> CMatrix {
    let big_d = 1usize << qubits;
    let mut rho = CMatrix::identity(big_d, big_d);
    let axes = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
    for code in 1..4usize.pow(qubits) {
        // Digit 0 = I, 1 = X, 2 = Y, 3 = Z.
        let (mut x, mut z, mut support) = (0u64, 0u64, 0usize);
        let mut wanted = vec![None; qubits as usize];
        let mut rest = code;
        for (j, slot) in wanted.iter_mut().enumerate() {
            let digit = rest % 4;
            rest /= 4;
            if digit == 0 {
                continue;
            }
            support |= 1 << j;
            *slot = Some(axes[digit - 1]);
            if digit != 3 {
                x |= 1 << j;
            }
            if digit != 1 {
                z |= 1 << j;
            }
        }
        let (mut total, mut shots) = (0i64, 0u64);
        for (setting, c) in plan.settings.iter().zip(counts) {
            if wanted.iter().zip(setting).any(|(w, s)| w.is_some_and(|w| w != *s)) {
                continue;
            }
            for (outcome, &n) in c.iter().enumerate() {
                let sign = if (outcome & support).count_ones() % 2 == 0 { 1 } else { -1 };
                total += sign * n as i64;
            }
            shots += c.iter().sum::<u64>();
        }
        let coefficient = total as f64 / shots as f64;
        let pauli = Pauli::new(x, z, 0);
        for b in 0..big_d {
            let (target, ip) = pauli.act_on_basis(b as u64);
            rho[(target as usize, b)] += C64::new(0.0, 1.0).powu(u32::from(ip)) * coefficient;
        }
    }
    rho / C64::new(big_d as f64, 0.0)
}

/// Whether the reference uses adaptive or non-adaptive access.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryMode {
    NonAdaptive,
    Adaptive,
}

/// Shape-only query references with all constants set to 1:
/// `d²/ε²·ln(1/η)` non-adaptively and `d²/ε·ln(1/η)` adaptively.
pub fn query_budget_reference(d: usize, epsilon: f64, eta: f64, mode: QueryMode) -> Result<f64> {
    check_contract(epsilon, eta)?;
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let d2 = (d * d) as f64;
    let log = (1.0 / eta).ln();
    Ok(match mode {
        QueryMode::NonAdaptive => d2 / (epsilon * epsilon) * log,
        QueryMode::Adaptive => d2 / epsilon * log,
    })
}

/// Relaxation `η = (δ + η₀)/(1 − η₀)` of the net obtained from a
/// `(t, δ)`-design when tomography fails with probability `η₀`.
pub fn designs_to_nets_eta(delta: f64, eta0: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eta0) {
        return Err(out_of_range("eta0", eta0, "[0, 1)"));
    }
    if !(delta >= 0.0) {
        return Err(out_of_range("delta", delta, ">= 0"));
    }
    Ok((delta + eta0) / (1.0 - eta0))
}
