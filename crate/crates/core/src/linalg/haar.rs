use super::{CMatrix, CVector, UnitaryMatrix, C64};
use crate::error::{Error, Result};
use crate::seed::RandomSeed;
use rand::Rng;
use rand_distr::StandardNormal;

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed `d × d` unitary.
///
/// QR of a complex Ginibre matrix, with the columns of `Q` rephased by
/// `R_jj / |R_jj|`. Without the rephasing the law of `Q` depends on the QR
/// sign convention and is not left-invariant.
pub fn haar_unitary(d: usize, seed: RandomSeed) -> Result<UnitaryMatrix> {
    haar_unitary_with_rng(d, &mut seed.rng())
}

pub fn haar_unitary_with_rng<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    Ok(UnitaryMatrix::from_trusted(q))
}

/// Haar-random pure state in `C^d`: a normalized complex Gaussian vector.
pub fn haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<CVector> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut v = CVector::from_fn(d, |_, _| complex_gaussian(rng));
    let norm = v.norm();
    v.unscale_mut(norm);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::UNITARITY_TOL;
    use crate::stats::mean_and_stderr;

    #[test]
    fn d1_is_a_phase() {
        let u = haar_unitary(1, RandomSeed::new(4)).unwrap();
        assert!((u.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn output_is_unitary_and_deterministic() {
        for d in [2, 5, 16] {
            let u = haar_unitary(d, RandomSeed::new(d as u64)).unwrap();
            assert!(u.unitarity_deviation() < UNITARITY_TOL);
            assert_eq!(u, haar_unitary(d, RandomSeed::new(d as u64)).unwrap());
        }
        assert!(matches!(haar_unitary(0, RandomSeed::new(0)), Err(Error::ZeroDimension)));
    }

    #[test]
    fn first_column_weights_average_to_one_over_d() {
        let d = 16;
        let n = 10_000;
        let base = RandomSeed::new(77);
        let mut per_x: Vec<Vec<f64>> = vec![Vec::with_capacity(n); d];
        for s in 0..n {
            let u = haar_unitary(d, base.derive(s as u64)).unwrap();
            for (x, col) in per_x.iter_mut().enumerate() {
                col.push(u.matrix()[(x, 0)].norm_sqr());
            }
        }
        for col in &per_x {
            let (m, se) = mean_and_stderr(col);
            assert!((m - 1.0 / d as f64).abs() <= 3.0 * se + 1e-12, "{m} vs {}", 1.0 / d as f64);
        }
    }

    #[test]
    fn left_invariance_on_second_moment_of_trace() {
        // E|tr(W U)|² = 1 for Haar U and any fixed unitary W; the unphased QR
        // factor of a Ginibre matrix fails this for W = 1 (it has a biased
        // diagonal).
        let d = 3;
        let n = 20_000;
        let w = haar_unitary(d, RandomSeed::new(123)).unwrap();
        let base = RandomSeed::new(5);
        let mut plain = Vec::with_capacity(n);
        let mut shifted = Vec::with_capacity(n);
        for s in 0..n {
            let u = haar_unitary(d, base.derive(s as u64)).unwrap();
            plain.push(u.matrix().trace().norm_sqr());
            shifted.push((w.matrix() * u.matrix()).trace().norm_sqr());
        }
        for xs in [&plain, &shifted] {
            let (m, se) = mean_and_stderr(xs);
            assert!((m - 1.0).abs() < 4.0 * se, "mean {m} se {se}");
        }
    }
}
