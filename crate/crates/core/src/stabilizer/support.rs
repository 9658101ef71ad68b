use super::{Pauli, Tableau};
use crate::seed::RandomSeed;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// `offset + span(basis)` over `Z₂ⁿ`. The basis is kept in reduced row-echelon
/// form (distinct leading bits, each cleared from every other vector and from
/// the offset), so equal sets compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineSupport {
    n: usize,
    basis: Vec<u64>,
    offset: u64,
}

impl AffineSupport {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn k_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.n
    }

    pub fn contains(&self, mut b: u64) -> bool {
        if self.n < 64 && b >> self.n != 0 {
            return false;
        }
        b ^= self.offset;
        for &v in &self.basis {
            if b >> leading_bit(v) & 1 == 1 {
                b ^= v;
            }
        }
        b == 0
    }

    /// Element `offset ⊕ Σ_{i ∈ coeffs} basis_i`.
    pub fn element(&self, coeffs: u64) -> u64 {
        self.basis
            .iter()
            .enumerate()
            .filter(|(i, _)| coeffs >> i & 1 == 1)
            .fold(self.offset, |acc, (_, &v)| acc ^ v)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        let coeffs = if self.basis.is_empty() { 0 } else { rng.random::<u64>() };
        self.element(coeffs)
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        (0..1u64 << self.basis.len()).map(|c| self.element(c))
    }
}

fn leading_bit(v: u64) -> u32 {
    63 - v.leading_zeros()
}

/// Reduced echelon basis of the span of `vectors`.
fn rref(vectors: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for mut v in vectors {
        for &b in &basis {
            if v >> leading_bit(b) & 1 == 1 {
                v ^= b;
            }
        }
        if v == 0 {
            continue;
        }
        let lead = leading_bit(v);
        for b in basis.iter_mut() {
            if *b >> lead & 1 == 1 {
                *b ^= v;
            }
        }
        basis.push(v);
    }
    basis.sort_unstable_by(|a, b| b.cmp(a));
    basis
}

/// Computational-basis outcomes of `C|0ⁿ⟩`: elimination over the X-parts of
/// the stabilizer rows. Rows with independent X-parts span the direction of
/// the support; the remaining rows reduce to `±Z^z` and pin the offset through
/// `z · b = sign`.
pub fn measurement_support(t: &Tableau) -> AffineSupport {
    let n = t.n();
    let mut rows: Vec<Pauli> = t.stabilizers().to_vec();
    let mut pivot_row = 0;
    for col in (0..n).rev() {
        let Some(found) = (pivot_row..n).find(|&r| rows[r].x >> col & 1 == 1) else {
            continue;
        };
        rows.swap(pivot_row, found);
        for r in 0..n {
            if r != pivot_row && rows[r].x >> col & 1 == 1 {
                rows[r] = rows[r].mul(&rows[pivot_row]);
            }
        }
        pivot_row += 1;
    }
    let directions = rref(rows[..pivot_row].iter().map(|p| p.x));

    // Constraints `z · b = s` from the Z-type rows, solved by elimination.
    let mut constraints: Vec<(u64, bool)> = rows[pivot_row..]
        .iter()
        .map(|p| {
            debug_assert_eq!(p.x, 0);
            (p.z, p.is_negative())
        })
        .collect();
    let mut offset = 0u64;
    let mut solved: Vec<(u64, bool)> = Vec::new();
    for c in constraints.iter_mut() {
        for &(z, s) in &solved {
            if c.0 >> leading_bit(z) & 1 == 1 {
                c.0 ^= z;
                c.1 ^= s;
            }
        }
        debug_assert_ne!(c.0, 0, "stabilizer rows are independent");
        let lead = leading_bit(c.0);
        for (z, s) in solved.iter_mut() {
            if *z >> lead & 1 == 1 {
                *z ^= c.0;
                *s ^= c.1;
            }
        }
        solved.push(*c);
    }
    // In reduced form every leading bit appears in exactly one constraint, so
    // setting only the leading bits of the unsatisfied ones solves the system.
    for &(z, s) in &solved {
        if s {
            offset |= 1 << leading_bit(z);
        }
    }
    for &v in &directions {
        if offset >> leading_bit(v) & 1 == 1 {
            offset ^= v;
        }
    }
    AffineSupport { n, basis: directions, offset }
}

/// `shots` independent computational-basis measurements of `C|0ⁿ⟩`.
pub fn sample_measurement(t: &Tableau, shots: usize, seed: RandomSeed) -> Vec<u64> {
    let support = measurement_support(t);
    let mut rng = seed.rng();
    (0..shots).map(|_| support.sample(&mut rng)).collect()
}
