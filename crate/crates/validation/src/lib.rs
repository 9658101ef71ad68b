//! Reference computations that share no code with the closed forms in
//! `prubench`: numerical maximization for the diamond distance and exact
//! big-integer Dirichlet moments for measurement patterns.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;

pub type C64 = Complex<f64>;

fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// `‖ρ_U − ρ_V‖₁` for the outputs of `U ⊗ I` and `V ⊗ I` on the pure input `ψ`.
pub fn output_trace_distance(u: &DMatrix<C64>, v: &DMatrix<C64>, psi: &DVector<C64>) -> f64 {
    let id = DMatrix::<C64>::identity(u.nrows(), u.nrows());
    let a = u.kronecker(&id) * psi;
    let b = v.kronecker(&id) * psi;
    let diff = &a * a.adjoint() - &b * b.adjoint();
    SymmetricEigen::new(diff).eigenvalues.iter().map(|l| l.abs()).sum()
}

/// Largest output trace distance over pure inputs with a `d`-dimensional
/// ancilla. Each restart runs projected gradient descent on
/// `|⟨ψ|(U†V ⊗ I)|ψ⟩|²` (the overlap of the two outputs) from a random start;
/// the result is the best trace distance evaluated directly on the outputs.
pub fn brute_force_diamond<R: Rng + ?Sized>(
    u: &DMatrix<C64>,
    v: &DMatrix<C64>,
    restarts: usize,
    iterations: usize,
    rng: &mut R,
) -> f64 {
    let d = u.nrows();
    let a = (u.adjoint() * v).kronecker(&DMatrix::<C64>::identity(d, d));
    let a_adj = a.adjoint();
    let step = C64::new(0.2, 0.0);
    let mut best: f64 = 0.0;
    for _ in 0..restarts {
        let mut psi = random_unit_vector(d * d, rng);
        for _ in 0..iterations {
            let a_psi = &a * &psi;
            let z = psi.dotc(&a_psi);
            let mut grad = a_psi * z.conj() + (&a_adj * &psi) * z;
            let radial = psi.dotc(&grad);
            grad -= &psi * radial;
            psi -= grad * step;
            let norm = psi.norm();
            psi /= C64::new(norm, 0.0);
        }
        best = best.max(output_trace_distance(u, v, &psi));
    }
    best
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Probability that `t = Σ nᵢ` computational-basis measurements of a Haar
/// state in dimension `d` produce a given set partition with block sizes
/// `nᵢ`, from the flat-Dirichlet moments `E[Π pᵢ^{nᵢ}] = (d−1)!Π nᵢ!/(d+t−1)!`
/// times the `d!/(d−b)!` ways to label the blocks.
pub fn haar_partition_probability_exact(d: u64, block_sizes: &[u64]) -> f64 {
    let blocks = block_sizes.len() as u64;
    if blocks > d {
        return 0.0;
    }
    let t: u64 = block_sizes.iter().sum();
    let labelings = factorial(d) / factorial(d - blocks);
    let numerator = labelings * factorial(d - 1) * block_sizes.iter().map(|&n| factorial(n)).product::<BigUint>();
    let denominator = factorial(d + t - 1);
    numerator.to_f64().expect("finite") / denominator.to_f64().expect("finite")
}

/// `max{C(d+t−1, t)², d^{2t}/t!}` with exact integer arithmetic, rounded
/// to `f64` only at the end.
pub fn prior_support_bound_exact(d: u64, t: u64) -> f64 {
    let binom = factorial(d + t - 1) / (factorial(t) * factorial(d - 1));
    let symmetric = (&binom * &binom).to_f64().expect("finite");
    let tensor = BigUint::from(d).pow(2 * t as u32).to_f64().expect("finite") / factorial(t).to_f64().expect("finite");
    symmetric.max(tensor)
}
