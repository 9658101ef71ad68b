use super::{check_qubits, Gate, Tableau};
use crate::error::{out_of_range, Error, Result};
use crate::seed::RandomSeed;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Parameters of `2^{−n/2} Σ_x i^{u·x} (−1)^{xᵀMx + v·x} |x⟩`.
///
/// `upper[i]` holds row `i` of the strictly upper-triangular `M` as a
/// bitmask (bits `j > i` only).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GammaParams {
    n: usize,
    upper: Vec<u64>,
    u: u64,
    v: u64,
}

impl GammaParams {
    /// Accepts any zero-diagonal `M` (rows as bitmasks); the quadratic form
    /// only sees `M_ij ⊕ M_ji`, which is folded into the upper triangle.
    pub fn new(n: usize, m_rows: &[u64], u: u64, v: u64) -> Result<Self> {
        check_qubits(n)?;
        if m_rows.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m_rows.len() });
        }
        let mask = super::low_mask(n);
        if m_rows.iter().any(|r| r & !mask != 0) || u & !mask != 0 || v & !mask != 0 {
            return Err(Error::InvalidArgument("bit vectors wider than n".into()));
        }
        if let Some(i) = (0..n).find(|&i| m_rows[i] >> i & 1 == 1) {
            return Err(Error::InvalidArgument(format!("M has a nonzero diagonal entry at {i}")));
        }
        let upper = (0..n)
            .map(|i| {
                let mut row = 0u64;
                for j in i + 1..n {
                    let bit = (m_rows[i] >> j ^ m_rows[j] >> i) & 1;
                    row |= bit << j;
                }
                row
            })
            .collect();
        Ok(GammaParams { n, upper, u, v })
    }

    /// Decodes `index ∈ [0, 2^{n(n−1)/2 + 2n})`: the low `n(n−1)/2` bits fill
    /// the upper triangle row by row, then `u`, then `v`.
    pub fn from_index(n: usize, index: u128) -> Result<Self> {
        check_qubits(n)?;
        let pairs = n * (n - 1) / 2;
        let total_bits = pairs + 2 * n;
        if total_bits > 128 {
            return Err(out_of_range("qubit count for indexed parameters", n, "<= 14"));
        }
        if total_bits < 128 && index >> total_bits != 0 {
            return Err(Error::InvalidArgument("index exceeds the parameter count".into()));
        }
        let mut upper = vec![0u64; n];
        let mut k = 0;
        for (i, row) in upper.iter_mut().enumerate() {
            for j in i + 1..n {
                *row |= ((index >> k & 1) as u64) << j;
                k += 1;
            }
        }
        let mask = super::low_mask(n) as u128;
        let u = (index >> pairs & mask) as u64;
        let v = (index >> (pairs + n) & mask) as u64;
        Ok(GammaParams { n, upper, u, v })
    }

    pub fn random(n: usize, seed: RandomSeed) -> Result<Self> {
        check_qubits(n)?;
        let mut rng = seed.rng();
        let mask = super::low_mask(n);
        let upper = (0..n).map(|i| rng.random::<u64>() & mask & !super::low_mask(i + 1)).collect();
        Ok(GammaParams { n, upper, u: rng.random::<u64>() & mask, v: rng.random::<u64>() & mask })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn upper(&self) -> &[u64] {
        &self.upper
    }

    pub fn u(&self) -> u64 {
        self.u
    }

    pub fn v(&self) -> u64 {
        self.v
    }

    /// `i^{u·x} (−1)^{xᵀMx + v·x}` as a power of `i`.
    pub fn phase_power(&self, x: u64) -> u8 {
        let quad: u32 = (0..self.n)
            .filter(|&i| x >> i & 1 == 1)
            .map(|i| (self.upper[i] & x).count_ones())
            .sum();
        let k = (self.u & x).count_ones() + 2 * (quad + (self.v & x).count_ones());
        (k % 4) as u8
    }
}

/// Tableau of the circuit `H^{⊗n}`, then `S` on qubits with `u_i = 1`, `CZ`
/// on pairs with `M_ij = 1`, and `Z` on qubits with `v_i = 1`.
pub fn gamma_state(p: &GammaParams) -> Result<Tableau> {
    let n = p.n;
    let mut t = Tableau::hadamard_all(n)?;
    for q in 0..n {
        if p.u >> q & 1 == 1 {
            t = t.then(Gate::S(q))?;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if p.upper[i] >> j & 1 == 1 {
                t = t.then(Gate::Cz(i, j))?;
            }
        }
    }
    for q in 0..n {
        if p.v >> q & 1 == 1 {
            t = t.then(Gate::Z(q))?;
        }
    }
    Ok(t)
}

/// `Π_{j=1}^{n} 1/(1 + 2^{−j})`.
pub fn full_support_probability(n: usize) -> f64 {
    (1..=n).map(|j| 1.0 / (1.0 + 0.5f64.powi(j as i32))).product()
}

/// The same product as a reduced fraction `(numerator, denominator)`:
/// `2^{n(n+1)/2} / Π (2^j + 1)`. The numerator is a power of two and the
/// denominator odd, so the fraction is already in lowest terms.
pub fn full_support_probability_exact(n: usize) -> Result<(u128, u128)> {
    let overflow = || Error::OutOfRange {
        what: "qubit count for exact probability",
        value: n.to_string(),
        expected: "small enough for 128-bit arithmetic",
    };
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for j in 1..=n as u32 {
        let pow = 1u128.checked_shl(j).filter(|_| j < 127).ok_or_else(overflow)?;
        num = num.checked_mul(pow).ok_or_else(overflow)?;
        den = den.checked_mul(pow + 1).ok_or_else(overflow)?;
    }
    Ok((num, den))
}
