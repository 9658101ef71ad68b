use super::{check_qubits, Pauli, Tableau};
use crate::error::Result;
use crate::seed::RandomSeed;
use rand::Rng;

/// Uniformly random Clifford (with uniformly random signs), via the
/// Bravyi–Maslov canonical form `F₁ · H · P · F₂` with the Hadamard/permutation
/// layer drawn from the quantum Mallows distribution.
pub fn random_clifford(n: usize, seed: RandomSeed) -> Result<Tableau> {
    check_qubits(n)?;
    let mut rng = seed.rng();
    let (had, perm) = sample_qmallows(n, &mut rng);

    let mut gamma1 = random_symmetric(n, &mut rng);
    let mut gamma2 = random_symmetric(n, &mut rng);
    let delta1 = random_unit_lower(n, &mut rng);
    let delta2 = random_unit_lower(n, &mut rng);
    for g in [&mut gamma1, &mut gamma2] {
        for (i, row) in g.iter_mut().enumerate() {
            *row |= (rng.random::<bool>() as u64) << i;
        }
    }

    let table1 = block_table(&gamma1, &delta1, n);
    let table2 = block_table(&gamma2, &delta2, n);

    let mut table: Vec<u128> = (0..2 * n)
        .map(|i| if i < n { table2[perm[i]] } else { table2[n + perm[i - n]] })
        .collect();
    for (q, &h) in had.iter().enumerate() {
        if h {
            table.swap(q, q + n);
        }
    }

    let mask = super::low_mask(n) as u128;
    let rows = table1
        .iter()
        .map(|&sel| {
            let mut acc = 0u128;
            for (j, &row) in table.iter().enumerate() {
                if sel >> j & 1 == 1 {
                    acc ^= row;
                }
            }
            let sign: bool = rng.random();
            Pauli::new((acc & mask) as u64, (acc >> n & mask) as u64, 2 * sign as u8)
        })
        .collect();
    Ok(Tableau::from_rows_unchecked(n, rows))
}

fn sample_qmallows<R: Rng>(n: usize, rng: &mut R) -> (Vec<bool>, Vec<usize>) {
    let mut had = vec![false; n];
    let mut perm = vec![0; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let m = n - i;
        let eps = 4f64.powi(-(m as i32));
        let r: f64 = rng.random();
        let index = -((r + (1.0 - r) * eps).log2().ceil()) as i64;
        let index = index.clamp(0, 2 * m as i64 - 1) as usize;
        had[i] = index < m;
        let k = if index < m { index } else { 2 * m - index - 1 };
        perm[i] = remaining.remove(k);
    }
    (had, perm)
}

/// Symmetric binary matrix with random off-diagonal entries and zero diagonal,
/// rows as bitmasks.
fn random_symmetric<R: Rng>(n: usize, rng: &mut R) -> Vec<u64> {
    let mut m = vec![0u64; n];
    for i in 1..n {
        for j in 0..i {
            if rng.random::<bool>() {
                m[i] |= 1 << j;
                m[j] |= 1 << i;
            }
        }
    }
    m
}

fn random_unit_lower<R: Rng>(n: usize, rng: &mut R) -> Vec<u64> {
    let mut m: Vec<u64> = (0..n).map(|i| 1 << i).collect();
    for (i, row) in m.iter_mut().enumerate() {
        for j in 0..i {
            if rng.random::<bool>() {
                *row |= 1 << j;
            }
        }
    }
    m
}

fn mat_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter()
        .map(|&row| {
            b.iter()
                .enumerate()
                .filter(|(j, _)| row >> j & 1 == 1)
                .fold(0, |acc, (_, &r)| acc ^ r)
        })
        .collect()
}

fn transpose(a: &[u64], n: usize) -> Vec<u64> {
    (0..n)
        .map(|i| (0..n).fold(0, |acc, j| acc | (a[j] >> i & 1) << j))
        .collect()
}

/// Inverse of a unit lower-triangular binary matrix by forward substitution.
fn inverse_unit_lower(l: &[u64]) -> Vec<u64> {
    let n = l.len();
    let mut inv: Vec<u64> = (0..n).map(|i| 1 << i).collect();
    for i in 0..n {
        for j in 0..i {
            if l[i] >> j & 1 == 1 {
                inv[i] ^= inv[j];
            }
        }
    }
    inv
}

/// Rows of `[[Δ, 0], [ΓΔ, (Δ⁻¹)ᵀ]]` as `2n`-bit masks (low half X, high half Z).
fn block_table(gamma: &[u64], delta: &[u64], n: usize) -> Vec<u128> {
    let prod = mat_mul(gamma, delta);
    let inv_t = transpose(&inverse_unit_lower(delta), n);
    delta
        .iter()
        .map(|&r| r as u128)
        .chain(prod.iter().zip(&inv_t).map(|(&p, &i)| p as u128 | (i as u128) << n))
        .collect()
}
