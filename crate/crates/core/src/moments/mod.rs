//! `t`-th moment superoperators `X ↦ E[U^{⊗t} X U^{⊗t†}]` in column-stacked
//! vectorized form, the Haar moment, and design distances.

mod distance;
mod haar;

pub use distance::{
    diamond_design_bounds, is_symmetric, symmetric_composition_check, tpe_distance, DesignDistanceReport,
    SymmetricCompositionReport,
};
pub use haar::{haar_moment_operator, permutation_operator, permutations};

use crate::budget::MemoryBudget;
use crate::ensembles::{EnsembleSpec, FiniteEnsemble, Generator};
use crate::error::{out_of_range, Error, Result};
use crate::linalg::{devectorize, kron_power, vectorize, CMatrix, C64};
use crate::seed::RandomSeed;
use nalgebra::linalg::SymmetricEigen;
use std::path::Path;

/// Largest supported `d^t`.
pub const MAX_MOMENT_SIDE: usize = 64;
pub const MAX_MOMENT_ORDER: u32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentSuperoperator {
    d: usize,
    t: u32,
    matrix: CMatrix,
    /// False when averaged over random draws rather than an exact list.
    exact: bool,
}

pub(crate) fn moment_side(d: usize, t: u32, budget: &MemoryBudget) -> Result<usize> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    if !(1..=MAX_MOMENT_ORDER).contains(&t) {
        return Err(out_of_range("moment order t", t, "1..=4"));
    }
    let side = (d as u128).pow(t);
    if side > MAX_MOMENT_SIDE as u128 {
        return Err(out_of_range("d^t", side, "<= 64"));
    }
    // Superoperator, Choi matrix and a decomposition workspace.
    budget.check("moment superoperator", side.pow(4) * 3, 16)?;
    Ok(side as usize)
}

impl MomentSuperoperator {
    pub(crate) fn from_parts(d: usize, t: u32, matrix: CMatrix, exact: bool) -> Self {
        MomentSuperoperator { d, t, matrix, exact }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// `d^t`, the side of the operators acted on.
    pub fn side(&self) -> usize {
        self.d.pow(self.t)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let side = self.side();
        if x.nrows() != side || x.ncols() != side {
            return Err(Error::DimensionMismatch { expected: side, found: x.nrows() });
        }
        devectorize(&(&self.matrix * vectorize(x)), side)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if (self.d, self.t) != (other.d, other.t) {
            return Err(Error::DimensionMismatch { expected: self.side(), found: other.side() });
        }
        Ok(MomentSuperoperator {
            d: self.d,
            t: self.t,
            matrix: &self.matrix * &other.matrix,
            exact: self.exact && other.exact,
        })
    }

    /// `J = Σ_{ij} |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`.
    pub fn choi(&self) -> CMatrix {
        choi_of(&self.matrix, self.side())
    }

    pub fn trace_preservation_error(&self) -> f64 {
        let side = self.side();
        let mut worst: f64 = 0.0;
        for i in 0..side {
            for j in 0..side {
                let col = self.matrix.column(i + j * side);
                let tr: C64 = (0..side).map(|a| col[a + a * side]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((tr - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Choi matrix (nonnegative up to rounding
    /// exactly when the map is completely positive).
    pub fn choi_min_eigenvalue(&self) -> f64 {
        let j = self.choi();
        let h = (&j + j.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `max_X ‖Φ(X†) − Φ(X)†‖` over matrix units.
    pub fn hermiticity_error(&self) -> f64 {
        let side = self.side();
        let mut worst: f64 = 0.0;
        for i in 0..side {
            for j in 0..side {
                let a = self.matrix.column(i + j * side);
                let b = self.matrix.column(j + i * side);
                for r in 0..side {
                    for c in 0..side {
                        worst = worst.max((a[r + c * side] - b[c + r * side].conj()).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn save_binary(&self, path: &Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        crate::linalg::io::write_binary(&self.matrix, f)
    }
}

pub(crate) fn choi_of(s: &CMatrix, side: usize) -> CMatrix {
    CMatrix::from_fn(side * side, side * side, |row, col| {
        let (i, a) = (row / side, row % side);
        let (j, b) = (col / side, col % side);
        s[(a + b * side, i + j * side)]
    })
}

/// `Σ_U w_U · conj(U^{⊗t}) ⊗ U^{⊗t}`.
pub fn moment_operator(ens: &FiniteEnsemble, t: u32, budget: &MemoryBudget) -> Result<MomentSuperoperator> {
    let d = ens.dim();
    let side = moment_side(d, t, budget)?;
    let mut acc = CMatrix::zeros(side * side, side * side);
    for (u, w) in ens.iter() {
        if w == 0.0 {
            continue;
        }
        let ut = kron_power(u, t, budget)?;
        acc += ut.matrix().map(|z| z.conj()).kronecker(ut.matrix()) * C64::new(w, 0.0);
    }
    Ok(MomentSuperoperator::from_parts(d, t, acc, true))
}

/// Empirical moment over `samples` draws of a generator; approximate.
pub fn moment_operator_sampled(
    generator: &Generator,
    t: u32,
    samples: usize,
    seed: RandomSeed,
    budget: &MemoryBudget,
) -> Result<MomentSuperoperator> {
    if samples == 0 {
        return Err(out_of_range("sample count", samples, ">= 1"));
    }
    moment_side(generator.dim(), t, budget)?;
    let ens = generator.materialize(samples, seed)?;
    let mut m = moment_operator(&ens, t, budget)?;
    m.exact = false;
    Ok(m)
}

/// Dispatches on the ensemble kind; generators need an explicit sample count.
pub fn moment_operator_for(
    spec: &EnsembleSpec,
    t: u32,
    samples: Option<usize>,
    budget: &MemoryBudget,
) -> Result<MomentSuperoperator> {
    match (spec, samples) {
        (EnsembleSpec::Finite(e), _) => moment_operator(e, t, budget),
        (EnsembleSpec::Generated { generator, seed }, Some(n)) => moment_operator_sampled(generator, t, n, *seed, budget),
        (EnsembleSpec::Generated { .. }, None) => Err(Error::InvalidArgument(
            "generator ensembles need an explicit sample count for an empirical moment".into(),
        )),
    }
}
