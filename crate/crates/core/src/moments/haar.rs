use super::{moment_side, MomentSuperoperator};
use crate::budget::MemoryBudget;
use crate::error::Result;
use crate::linalg::{vectorize, CMatrix, C64};
use nalgebra::{DMatrix, SymmetricEigen};

/// Relative eigenvalue cutoff for the Gram pseudo-inverse.
pub const GRAM_PINV_TOL: f64 = 1e-10;

/// All permutations of `0..t` in lexicographic order.
pub fn permutations(t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..t).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (1..t).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..t).rev().find(|&j| current[j] > current[i - 1]).expect("successor exists");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

fn cycle_count(perm: &[usize]) -> u32 {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if !seen[start] {
            cycles += 1;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = perm[k];
            }
        }
    }
    cycles
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

/// `P_σ` on `(ℂ^d)^{⊗t}`: the tensor factor in slot `k` moves to slot `σ(k)`.
pub fn permutation_operator(perm: &[usize], d: usize) -> CMatrix {
    let t = perm.len();
    let side = d.pow(t as u32);
    let mut m = CMatrix::zeros(side, side);
    let mut digits = vec![0usize; t];
    let mut out = vec![0usize; t];
    for input in 0..side {
        let mut rest = input;
        for k in (0..t).rev() {
            digits[k] = rest % d;
            rest /= d;
        }
        for k in 0..t {
            out[perm[k]] = digits[k];
        }
        let output = out.iter().fold(0, |acc, &x| acc * d + x);
        m[(output, input)] = C64::new(1.0, 0.0);
    }
    m
}

/// Orthogonal projector (Hilbert–Schmidt) onto the span of the permutation
/// operators, `V G⁺ V†` with `V` the vectorized `P_σ` and
/// `G_{στ} = d^{#cycles(σ⁻¹τ)}`.
pub fn haar_moment_operator(d: usize, t: u32, budget: &MemoryBudget) -> Result<MomentSuperoperator> {
    let side = moment_side(d, t, budget)?;
    let perms = permutations(t as usize);
    let k = perms.len();
    let mut v = CMatrix::zeros(side * side, k);
    for (c, p) in perms.iter().enumerate() {
        v.set_column(c, &vectorize(&permutation_operator(p, d)));
    }
    let gram = DMatrix::from_fn(k, k, |a, b| {
        let sigma_inv = inverse(&perms[a]);
        let sigma_inv_tau: Vec<usize> = perms[b].iter().map(|&x| sigma_inv[x]).collect();
        (d as f64).powi(cycle_count(&sigma_inv_tau) as i32)
    });
    let eig = SymmetricEigen::new(gram);
    let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let inv_vals = eig.eigenvalues.map(|l| if l > GRAM_PINV_TOL * max { 1.0 / l } else { 0.0 });
    let pinv = &eig.eigenvectors * DMatrix::from_diagonal(&inv_vals) * eig.eigenvectors.transpose();
    let pinv = pinv.map(|x| C64::new(x, 0.0));
    let matrix = &v * pinv * v.adjoint();
    Ok(MomentSuperoperator::from_parts(d, t, matrix, true))
}
