//! Dense complex linear algebra: unitaries, Kronecker powers, vectorization,
//! Schatten norms, Haar sampling and the exact diamond distance between
//! unitary channels.

pub(crate) mod diamond;
mod haar;
pub mod io;

pub use diamond::{diamond_distance_from_eigenvalues, diamond_distance_unitaries, origin_hull_distance};
pub use haar::{haar_state, haar_unitary, haar_unitary_with_rng};

use crate::budget::MemoryBudget;
use crate::error::{out_of_range, Error, Result};
use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Max-entry deviation of `U U†` from the identity tolerated by [`UnitaryMatrix`].
pub const UNITARITY_TOL: f64 = 1e-10;

/// Tolerance for metric identities (triangle inequality, invariances).
pub const METRIC_TOL: f64 = 1e-9;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A square matrix `U` with `U U† = 1` to within [`UNITARITY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::ZeroDimension);
        }
        let deviation = unitarity_deviation(&m);
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix the caller already knows to be unitary (products of
    /// unitaries, QR factors). Checked in debug builds only.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        debug_assert!(m.is_square());
        debug_assert!(unitarity_deviation(&m) < 1e-8, "{}", unitarity_deviation(&m));
        Self(m)
    }

    pub fn identity(d: usize) -> Self {
        Self(CMatrix::identity(d, d))
    }

    /// Diagonal unitary with the given entries (each must have unit modulus).
    pub fn diagonal(entries: &[C64]) -> Result<Self> {
        Self::new(CMatrix::from_diagonal(&CVector::from_column_slice(entries)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn conjugate(&self) -> Self {
        Self(self.0.conjugate())
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 * &other.0))
    }

    pub fn scale_phase(&self, theta: f64) -> Self {
        Self(self.0.map(|z| z * C64::from_polar(1.0, theta)))
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.0)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.0 * v
    }
}

impl Serialize for UnitaryMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        io::MatrixJson::from(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitaryMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = io::MatrixJson::deserialize(d)?;
        let m = raw.to_matrix().map_err(serde::de::Error::custom)?;
        UnitaryMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn check_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `max |(M M† − 1)_ij|`.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    let prod = m * m.adjoint();
    let mut dev: f64 = 0.0;
    for ((i, j), z) in prod.iter().enumerate().map(|(k, z)| ((k % m.nrows(), k / m.nrows()), z)) {
        let target = if i == j { ONE } else { ZERO };
        dev = dev.max((z - target).norm());
    }
    dev
}

/// Schatten index: trace norm, Frobenius norm or operator norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Schatten {
    One,
    Two,
    Inf,
}

pub fn schatten_norm(x: &CMatrix, k: Schatten) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    if k == Schatten::Two {
        return x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    }
    let sv = x.clone().svd(false, false).singular_values;
    match k {
        Schatten::One => sv.iter().sum(),
        Schatten::Inf => sv.iter().cloned().fold(0.0, f64::max),
        Schatten::Two => unreachable!(),
    }
}

/// Largest singular value.
pub fn operator_norm(x: &CMatrix) -> f64 {
    schatten_norm(x, Schatten::Inf)
}

/// Column-stacking vectorization: `vec(X)[i + j·rows] = X[i, j]`, so that
/// `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
pub fn vectorize(x: &CMatrix) -> CVector {
    CVector::from_column_slice(x.as_slice())
}

/// Inverse of [`vectorize`] for a `d × d` matrix.
pub fn devectorize(v: &CVector, d: usize) -> Result<CMatrix> {
    if v.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: v.len(),
        });
    }
    Ok(CMatrix::from_column_slice(d, d, v.as_slice()))
}

/// Kronecker product `a ⊗ b` (first factor most significant in the index).
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `U^{⊗t}`, refusing to allocate more than the budget allows.
pub fn kron_power(u: &UnitaryMatrix, t: u32, budget: &MemoryBudget) -> Result<UnitaryMatrix> {
    if t == 0 {
        return Err(out_of_range("t", t, "t >= 1"));
    }
    let d = u.dim() as u128;
    let side = d
        .checked_pow(t)
        .ok_or_else(|| out_of_range("d^t", format!("{d}^{t}"), "fits in memory"))?;
    budget.check("kron_power", side * side, 16)?;
    let mut acc = u.matrix().clone();
    for _ in 1..t {
        acc = acc.kronecker(u.matrix());
    }
    Ok(UnitaryMatrix(acc))
}

/// Closest unitary in any unitarily invariant norm: the polar factor `W V†`
/// of `M = W Σ V†`.
pub fn nearest_unitary(m: &CMatrix) -> Result<UnitaryMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let svd = m.clone().svd(true, true);
    let (Some(w), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::InvalidArgument("svd failed to converge".into()));
    };
    Ok(UnitaryMatrix::from_trusted(w * v_t))
}

/// Hermitian conjugate as a plain matrix helper.
pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}
