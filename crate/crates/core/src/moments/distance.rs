use super::{haar_moment_operator, moment_operator, MomentSuperoperator};
use crate::budget::MemoryBudget;
use crate::ensembles::FiniteEnsemble;
use crate::error::{out_of_range, Error, Result};
use crate::linalg::{diamond_distance_unitaries, operator_norm, CMatrix, UnitaryMatrix, C64};
use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

/// Support cutoff for the Haar Choi matrix, relative to its largest eigenvalue.
const SUPPORT_TOL: f64 = 1e-10;
/// Mass of `J_ν` outside the Haar support tolerated as rounding.
const LEAK_TOL: f64 = 1e-9;
/// Channels closer than this are treated as equal when testing symmetry.
const CHANNEL_EQ_TOL: f64 = 1e-9;

/// `‖Φ_ν − Φ_Haar‖_{2→2}`: the largest singular value of the difference of
/// the superoperator matrices.
pub fn tpe_distance(ens: &FiniteEnsemble, t: u32, budget: &MemoryBudget) -> Result<f64> {
    let nu = moment_operator(ens, t, budget)?;
    let haar = haar_moment_operator(ens.dim(), t, budget)?;
    Ok(operator_norm(&(nu.matrix() - haar.matrix())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignDistanceReport {
    pub d: usize,
    pub t: u32,
    pub lambda_tpe: f64,
    /// Lower bound on the diamond distance `δ`: `λ·d^{−t/2}` in general, and
    /// `λ` itself when the ensemble equals its adjoint ensemble.
    pub diamond_lower: f64,
    /// `d^t·λ`.
    pub diamond_upper: f64,
    pub symmetric: bool,
    /// Smallest `ε` with `(1−ε) J_Haar ≤ J_ν ≤ (1+ε) J_Haar`; `None` when `J_ν`
    /// has weight outside the support of `J_Haar`.
    pub eps_relative: Option<f64>,
    pub not_relative: bool,
}

pub fn diamond_design_bounds(ens: &FiniteEnsemble, t: u32, budget: &MemoryBudget) -> Result<DesignDistanceReport> {
    let d = ens.dim();
    let nu = moment_operator(ens, t, budget)?;
    let haar = haar_moment_operator(d, t, budget)?;
    let symmetric = is_symmetric(ens);
    Ok(report_from(&nu, &haar, symmetric))
}

fn report_from(nu: &MomentSuperoperator, haar: &MomentSuperoperator, symmetric: bool) -> DesignDistanceReport {
    let (d, t) = (nu.d(), nu.t());
    let lambda = operator_norm(&(nu.matrix() - haar.matrix()));
    let scale = (d as f64).powi(t as i32);
    let diamond_lower = if symmetric { lambda } else { lambda / scale.sqrt() };
    let eps_relative = relative_epsilon(&nu.choi(), &haar.choi());
    DesignDistanceReport {
        d,
        t,
        lambda_tpe: lambda,
        diamond_lower,
        diamond_upper: scale * lambda,
        symmetric,
        not_relative: eps_relative.is_none(),
        eps_relative,
    }
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Generalized eigenvalue extremes of `J_ν` against `J_Haar` on the support of
/// `J_Haar`: with `J_Haar = QΛQ†` restricted to its support,
/// `ε = max(μ_max − 1, 1 − μ_min)` over the spectrum of
/// `Λ^{−1/2} Q† J_ν Q Λ^{−1/2}`.
fn relative_epsilon(j_nu: &CMatrix, j_haar: &CMatrix) -> Option<f64> {
    let eig = SymmetricEigen::new(hermitian_part(j_haar));
    let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] > SUPPORT_TOL * max).collect();
    let q = CMatrix::from_fn(j_haar.nrows(), keep.len(), |r, c| eig.eigenvectors[(r, keep[c])]);
    let j_nu = hermitian_part(j_nu);

    let outside = CMatrix::identity(j_nu.nrows(), j_nu.nrows()) - &q * q.adjoint();
    let leak = operator_norm(&(&outside * &j_nu * &outside));
    if leak > LEAK_TOL * max.max(1.0) {
        return None;
    }
    let scale = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        keep.len(),
        keep.iter().map(|&i| C64::new(eig.eigenvalues[i].powf(-0.5), 0.0)),
    ));
    let k = &scale * q.adjoint() * &j_nu * &q * &scale;
    let mu = SymmetricEigen::new(hermitian_part(&k)).eigenvalues;
    let hi = mu.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = mu.iter().cloned().fold(f64::INFINITY, f64::min);
    Some((hi - 1.0).max(1.0 - lo).max(0.0))
}

/// Whether `ν = ν†` as a distribution over channels: elements are grouped by
/// channel equality, and each group must carry the same weight as the group
/// of its adjoints.
pub fn is_symmetric(ens: &FiniteEnsemble) -> bool {
    let same = |a: &UnitaryMatrix, b: &UnitaryMatrix| {
        diamond_distance_unitaries(a, b).map(|x| x <= CHANNEL_EQ_TOL).unwrap_or(false)
    };
    let weight_of = |target: &UnitaryMatrix| -> f64 {
        ens.iter().filter(|(u, _)| same(u, target)).map(|(_, w)| w).sum()
    };
    ens.iter().all(|(u, _)| (weight_of(u) - weight_of(&u.adjoint())).abs() <= 1e-12)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricCompositionReport {
    pub m: u32,
    pub t: u32,
    pub lambda: f64,
    pub lambda_m: f64,
    pub lambda_power: f64,
    /// `|λ_m − λ^m| ≤ 1e−8·max(1, λ^m)`.
    pub power_law_holds: bool,
    /// Bracket consistency of `δ_m ≤ δ^m`: the lower bound on `δ_m` does not
    /// exceed the `m`-th power of the upper bound on `δ`.
    pub diamond_consistent: bool,
}

/// Largest explicit `m`-fold product ensemble built.
pub const MAX_COMPOSED_ELEMENTS: usize = 200_000;

/// Builds the `m`-fold composition `U_1 U_2 ⋯ U_m` of i.i.d. draws explicitly
/// and compares its 2→2 distance with `λ^m`.
pub fn symmetric_composition_check(
    ens: &FiniteEnsemble,
    m: u32,
    t: u32,
    budget: &MemoryBudget,
) -> Result<SymmetricCompositionReport> {
    if m == 0 {
        return Err(out_of_range("repetitions m", m, ">= 1"));
    }
    if !is_symmetric(ens) {
        return Err(Error::NonSymmetric);
    }
    let count = (ens.len() as u128).checked_pow(m).unwrap_or(u128::MAX);
    if count > MAX_COMPOSED_ELEMENTS as u128 {
        return Err(out_of_range("composed ensemble size", count, "<= 200000"));
    }
    let d = ens.dim();
    let haar = haar_moment_operator(d, t, budget)?;
    let base = report_from(&moment_operator(ens, t, budget)?, &haar, true);

    let mut composed = ens.clone();
    for _ in 1..m {
        let mut unitaries = Vec::with_capacity(composed.len() * ens.len());
        let mut weights = Vec::with_capacity(composed.len() * ens.len());
        for (a, wa) in composed.iter() {
            for (b, wb) in ens.iter() {
                unitaries.push(a.mul(b)?);
                weights.push(wa * wb);
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        composed = FiniteEnsemble::new(unitaries, weights)?;
    }
    let lambda_m = operator_norm(&(moment_operator(&composed, t, budget)?.matrix() - haar.matrix()));
    let lambda_power = base.lambda_tpe.powi(m as i32);
    let scale = (d as f64).powi(t as i32);
    Ok(SymmetricCompositionReport {
        m,
        t,
        lambda: base.lambda_tpe,
        lambda_m,
        lambda_power,
        power_law_holds: (lambda_m - lambda_power).abs() <= 1e-8 * lambda_power.max(1.0),
        diamond_consistent: lambda_m <= base.diamond_upper.powi(m as i32) * scale.max(1.0) + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{clifford_group, pauli_group};
    use crate::linalg::haar_unitary;
    use crate::seed::RandomSeed;

    fn budget() -> MemoryBudget {
        MemoryBudget::default()
    }

    #[test]
    fn exact_designs_have_zero_distance() {
        assert!(tpe_distance(&pauli_group(1).unwrap(), 1, &budget()).unwrap() < 1e-10);
        assert!(tpe_distance(&pauli_group(2).unwrap(), 1, &budget()).unwrap() < 1e-10);
        let c = clifford_group(1).unwrap();
        for t in 1..=3 {
            let r = diamond_design_bounds(&c, t, &budget()).unwrap();
            assert!(r.lambda_tpe < 1e-9 && r.diamond_upper < 1e-9 && r.diamond_lower < 1e-9);
            assert!(r.eps_relative.unwrap() < 1e-9);
            assert!(r.symmetric);
        }
        assert!(tpe_distance(&c, 4, &budget()).unwrap() > 1e-3);
    }

    #[test]
    fn identity_singleton_matches_direct_svd() {
        let e = FiniteEnsemble::uniform(vec![UnitaryMatrix::identity(2)]).unwrap();
        let lambda = tpe_distance(&e, 1, &budget()).unwrap();
        // Φ_id − Φ_Haar is the projector onto traceless operators (rank 3).
        let diff = CMatrix::identity(4, 4) - haar_moment_operator(2, 1, &budget()).unwrap().matrix();
        let sv = diff.svd(false, false).singular_values;
        assert!((lambda - sv.max()).abs() < 1e-12);
        assert!((lambda - 1.0).abs() < 1e-12);
    }

    #[test]
    fn upper_bound_is_d_to_the_t_times_lambda() {
        let e = FiniteEnsemble::uniform(vec![UnitaryMatrix::identity(2)]).unwrap();
        let r = diamond_design_bounds(&e, 2, &budget()).unwrap();
        assert!((r.diamond_upper - 4.0 * r.lambda_tpe).abs() < 1e-12);
        assert!(r.diamond_lower <= r.diamond_upper);
        // J_id = |Ω⟩⟨Ω| lies inside the span of the permutation operators but
        // is rank one there, so the lower sandwich fails: ε ≥ 1.
        assert!(r.eps_relative.unwrap() >= 1.0 - 1e-9);
        // Every J_U lies in the support of J_Haar = E[J_U], so a single
        // unitary is relative with ε ≥ 1 rather than flagged.
        let u = haar_unitary(2, RandomSeed::new(12)).unwrap();
        let single = FiniteEnsemble::uniform(vec![u]).unwrap();
        let r = diamond_design_bounds(&single, 2, &budget()).unwrap();
        assert!(!r.not_relative && r.eps_relative.unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn choi_weight_outside_the_haar_support_is_flagged() {
        let haar = haar_moment_operator(2, 2, &budget()).unwrap().choi();
        let n = haar.nrows();
        assert!(relative_epsilon(&haar, &haar).unwrap() < 1e-9);
        assert!(relative_epsilon(&CMatrix::identity(n, n), &haar).is_none());
    }

    #[test]
    fn relative_epsilon_dominates_the_diamond_lower_bound() {
        let base = RandomSeed::new(31);
        for i in 0..6 {
            let draws: Vec<UnitaryMatrix> = (0..12).map(|j| haar_unitary(2, base.derive(12 * i + j)).unwrap()).collect();
            let e = FiniteEnsemble::uniform(draws).unwrap();
            for t in 1..=2 {
                let r = diamond_design_bounds(&e, t, &budget()).unwrap();
                assert!(r.diamond_lower <= r.diamond_upper);
                if let Some(eps) = r.eps_relative {
                    assert!(r.diamond_lower <= eps + 1e-9);
                    assert!(eps <= 2f64.powi(2 * t as i32) * r.lambda_tpe + 1e-9);
                }
            }
        }
    }

    #[test]
    fn symmetry_detection() {
        let u = haar_unitary(2, RandomSeed::new(5)).unwrap();
        let sym = FiniteEnsemble::uniform(vec![u.clone(), u.adjoint()]).unwrap();
        assert!(is_symmetric(&sym));
        let phased = FiniteEnsemble::uniform(vec![u.clone(), u.adjoint().scale_phase(0.4)]).unwrap();
        assert!(is_symmetric(&phased));
        let lopsided = FiniteEnsemble::new(vec![u.clone(), u.adjoint()], vec![0.7, 0.3]).unwrap();
        assert!(!is_symmetric(&lopsided));
        assert!(matches!(symmetric_composition_check(&lopsided, 2, 1, &budget()), Err(Error::NonSymmetric)));
        assert!(is_symmetric(&pauli_group(1).unwrap()));
    }

    #[test]
    fn composition_power_law() {
        let u = haar_unitary(2, RandomSeed::new(6)).unwrap();
        let sym = FiniteEnsemble::uniform(vec![u.clone(), u.adjoint()]).unwrap();
        let one = symmetric_composition_check(&sym, 1, 1, &budget()).unwrap();
        assert_eq!(one.lambda, one.lambda_m);
        let two = symmetric_composition_check(&sym, 2, 1, &budget()).unwrap();
        assert!(two.power_law_holds, "{two:?}");
        assert!(two.diamond_consistent);
        for t in 1..=2 {
            let r = symmetric_composition_check(&sym, 3, t, &budget()).unwrap();
            assert!(r.power_law_holds, "{r:?}");
        }
        let c = symmetric_composition_check(&clifford_group(1).unwrap(), 2, 2, &budget()).unwrap();
        assert!(c.lambda_m < 1e-9);
    }
}
