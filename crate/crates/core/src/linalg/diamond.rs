use super::{check_same_dim, CMatrix, UnitaryMatrix, C64};
use crate::error::Result;
use nalgebra::linalg::{Schur, SymmetricEigen};
use std::f64::consts::{PI, TAU};

/// Exact diamond distance `‖U(·)U† − V(·)V†‖⋄`.
///
/// For unitary channels the distance is `2·sqrt(1 − r²)` where `r` is the
/// Euclidean distance from the origin to the convex hull of the spectrum of
/// `U†V`. Eigenvalues of a unitary lie on the unit circle, so the hull is the
/// inscribed polygon and `r = cos(φ/2)` with `φ` the smallest arc containing
/// every eigenphase; the distance becomes `2·sin(φ/2)` (or 2 once `φ ≥ π`).
/// Working with the arc keeps near-equal channels accurate to machine
/// precision instead of `sqrt(machine precision)`.
pub fn diamond_distance_unitaries(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64> {
    check_same_dim(u.dim(), v.dim())?;
    let d = u.dim();
    if d == 1 {
        return Ok(0.0);
    }
    let w = u.matrix().adjoint() * v.matrix();
    if d == 2 {
        return Ok(diamond_distance_2x2([w[(0, 0)], w[(0, 1)], w[(1, 0)], w[(1, 1)]]));
    }
    Ok(diamond_distance_from_eigenvalues(&unitary_eigenvalues(w)))
}

/// QR sweeps allowed per eigenvalue before giving up on Schur. nalgebra's
/// uncapped iteration can stall for minutes on products like `U†U` that
/// equal the identity up to rounding.
const SCHUR_SWEEPS_PER_DIM: usize = 200;

/// Spectrum of a unitary: complex Schur, falling back to diagonalizing the
/// Hermitian combination `Re W + α Im W` when Schur does not converge.
pub(crate) fn unitary_eigenvalues(w: CMatrix) -> Vec<C64> {
    let d = w.nrows();
    if let Some(schur) = Schur::try_new(w.clone(), f64::EPSILON, SCHUR_SWEEPS_PER_DIM * d) {
        if let Some(eigs) = schur.eigenvalues() {
            return eigs.iter().copied().collect();
        }
    }
    normal_eigenvalues(&w)
}

/// For normal `W` the Hermitian and anti-Hermitian parts commute, so the
/// eigenvectors of `(W + W†)/2 + α(W − W†)/(2i)` diagonalize `W` whenever
/// `α` separates distinct eigenvalues (all but finitely many `α` do).
/// Eigenvalues come back as Rayleigh quotients.
fn normal_eigenvalues(w: &CMatrix) -> Vec<C64> {
    let adj = w.adjoint();
    let re = (w + &adj) * C64::new(0.5, 0.0);
    let im = (w - &adj) * C64::new(0.0, -0.5);
    let mut best: Option<(f64, Vec<C64>)> = None;
    for alpha in [0.618_033_988_749_895, -1.414_213_562_373_095, 2.718_281_828_459_045] {
        let vecs = SymmetricEigen::new(&re + &im * C64::new(alpha, 0.0)).eigenvectors;
        let mut residual: f64 = 0.0;
        let eigs: Vec<C64> = vecs
            .column_iter()
            .map(|v| {
                let wv = w * v;
                let lambda = v.dotc(&wv);
                residual = residual.max((wv - v * lambda).norm());
                lambda
            })
            .collect();
        if residual < 1e-10 {
            return eigs;
        }
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, eigs));
        }
    }
    best.expect("at least one attempt").1
}

/// Distance for a `2 × 2` unitary `W = U†V` given row-major.
///
/// For a normal `2 × 2` matrix, `|λ₁ − λ₂|² = |a − d|² + 2|b|² + 2|c|²`, and for
/// two points on the unit circle the hull distance formula reduces to
/// `|λ₁ − λ₂|`.
pub(crate) fn diamond_distance_2x2(w: [C64; 4]) -> f64 {
    let [a, b, c, d] = w;
    ((a - d).norm_sqr() + 2.0 * b.norm_sqr() + 2.0 * c.norm_sqr())
        .sqrt()
        .min(2.0)
}

/// Diamond distance of the channel `W(·)W†` from the identity channel, given
/// the spectrum of the unitary `W`.
pub fn diamond_distance_from_eigenvalues(eigs: &[C64]) -> f64 {
    if eigs.len() <= 1 {
        return 0.0;
    }
    let mut angles: Vec<f64> = eigs.iter().map(|z| z.arg()).collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    let mut max_gap = TAU - (angles[angles.len() - 1] - angles[0]);
    for pair in angles.windows(2) {
        max_gap = max_gap.max(pair[1] - pair[0]);
    }
    let arc = TAU - max_gap;
    if arc >= PI {
        2.0
    } else {
        2.0 * (arc / 2.0).sin()
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn segment_origin_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return a.0.hypot(a.1);
    }
    let s = (-(a.0 * dx + a.1 * dy) / len2).clamp(0.0, 1.0);
    (a.0 + s * dx).hypot(a.1 + s * dy)
}

/// Euclidean distance from the origin to the convex hull of a planar point
/// set (monotone-chain hull; a collinear or single-point hull degenerates to
/// segment or point distance).
pub fn origin_hull_distance(points: &[(f64, f64)]) -> f64 {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    match pts.len() {
        0 => return f64::INFINITY,
        1 => return pts[0].0.hypot(pts[0].1),
        _ => {}
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() == 2 {
        return segment_origin_distance(hull[0], hull[1]);
    }
    let origin = (0.0, 0.0);
    let inside = (0..hull.len()).all(|i| cross(hull[i], hull[(i + 1) % hull.len()], origin) >= 0.0);
    if inside {
        return 0.0;
    }
    (0..hull.len())
        .map(|i| segment_origin_distance(hull[i], hull[(i + 1) % hull.len()]))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, CMatrix, METRIC_TOL};
    use crate::seed::RandomSeed;

    fn z_gate() -> UnitaryMatrix {
        UnitaryMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]).unwrap()
    }

    #[test]
    fn near_identity_products_do_not_stall_schur() {
        // Plain `Schur::new` spins for minutes on this `U†U`.
        let u = haar_unitary(3, RandomSeed::new(1)).unwrap();
        assert!(diamond_distance_unitaries(&u, &u).unwrap() < METRIC_TOL);
    }

    #[test]
    fn hermitian_fallback_recovers_the_spectrum() {
        let v = haar_unitary(4, RandomSeed::new(7)).unwrap();
        let phases = [0.3, -1.2, 2.9, 0.3];
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(4, phases.iter().map(|&p| C64::from_polar(1.0, p))));
        let w = v.matrix() * diag * v.matrix().adjoint();
        let mut got: Vec<f64> = normal_eigenvalues(&w).iter().map(|z| z.arg()).collect();
        got.sort_by(f64::total_cmp);
        let mut want = phases.to_vec();
        want.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip(&want) {
            assert!((g - e).abs() < 1e-10, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn identical_and_phase_shifted_channels_are_at_zero() {
        for d in [2, 3, 5] {
            let u = haar_unitary(d, RandomSeed::new(d as u64)).unwrap();
            assert!(diamond_distance_unitaries(&u, &u).unwrap() < METRIC_TOL);
            let shifted = u.scale_phase(1.234);
            assert!(diamond_distance_unitaries(&u, &shifted).unwrap() < METRIC_TOL);
        }
    }

    #[test]
    fn identity_vs_z_is_two() {
        let d = diamond_distance_unitaries(&UnitaryMatrix::identity(2), &z_gate()).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_phase_deviation_closed_form() {
        for &theta in &[0.01, 0.3, 0.77, 0.999] {
            let mut entries = vec![C64::new(1.0, 0.0); 4];
            entries[2] = C64::from_polar(1.0, PI * theta);
            let v = UnitaryMatrix::diagonal(&entries).unwrap();
            let d = diamond_distance_unitaries(&UnitaryMatrix::identity(4), &v).unwrap();
            assert!((d - 2.0 * (PI * theta / 2.0).sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let r = diamond_distance_unitaries(&UnitaryMatrix::identity(2), &UnitaryMatrix::identity(3));
        assert!(r.is_err());
    }

    #[test]
    fn two_by_two_fast_path_matches_general_spectrum() {
        let base = RandomSeed::new(31);
        for i in 0..200 {
            let u = haar_unitary(2, base.derive(2 * i)).unwrap();
            let v = haar_unitary(2, base.derive(2 * i + 1)).unwrap();
            let fast = diamond_distance_unitaries(&u, &v).unwrap();
            let w: CMatrix = u.matrix().adjoint() * v.matrix();
            let eig = Schur::new(w).eigenvalues().unwrap();
            let general = diamond_distance_from_eigenvalues(eig.as_slice());
            assert!((fast - general).abs() < 1e-10, "{fast} vs {general}");
        }
    }

    #[test]
    fn arc_formula_agrees_with_planar_hull() {
        let base = RandomSeed::new(8);
        for i in 0..200 {
            let d = 2 + (i % 5) as usize;
            let u = haar_unitary(d, base.derive(2 * i)).unwrap();
            let v = haar_unitary(d, base.derive(2 * i + 1)).unwrap();
            let w: CMatrix = u.matrix().adjoint() * v.matrix();
            let eig = Schur::new(w).eigenvalues().unwrap();
            let pts: Vec<(f64, f64)> = eig.iter().map(|z| (z.re, z.im)).collect();
            let r = origin_hull_distance(&pts).min(1.0);
            let via_hull = 2.0 * (1.0 - r * r).max(0.0).sqrt();
            let via_arc = diamond_distance_unitaries(&u, &v).unwrap();
            assert!((via_hull - via_arc).abs() < 1e-6, "{via_hull} vs {via_arc}");
        }
    }

    #[test]
    fn planar_hull_degenerate_cases() {
        assert!((origin_hull_distance(&[(3.0, 4.0)]) - 5.0).abs() < 1e-15);
        // Collinear points: hull is the segment from (1,-1) to (1,2).
        assert!((origin_hull_distance(&[(1.0, -1.0), (1.0, 0.5), (1.0, 2.0)]) - 1.0).abs() < 1e-15);
        // Square around the origin.
        let sq = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
        assert_eq!(origin_hull_distance(&sq), 0.0);
        // Triangle off to the side.
        let tri = [(2.0, 0.0), (3.0, 1.0), (3.0, -1.0)];
        assert!((origin_hull_distance(&tri) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn metric_properties() {
        let base = RandomSeed::new(99);
        for i in 0..50 {
            let d = 2 + (i % 3) as usize;
            let u = haar_unitary(d, base.derive(3 * i)).unwrap();
            let v = haar_unitary(d, base.derive(3 * i + 1)).unwrap();
            let w = haar_unitary(d, base.derive(3 * i + 2)).unwrap();
            let uv = diamond_distance_unitaries(&u, &v).unwrap();
            let vu = diamond_distance_unitaries(&v, &u).unwrap();
            let uw = diamond_distance_unitaries(&u, &w).unwrap();
            let wv = diamond_distance_unitaries(&w, &v).unwrap();
            assert!((0.0..=2.0).contains(&uv));
            assert!((uv - vu).abs() < METRIC_TOL);
            assert!(uv <= uw + wv + METRIC_TOL);
            let left = diamond_distance_unitaries(&w.mul(&u).unwrap(), &w.mul(&v).unwrap()).unwrap();
            assert!((left - uv).abs() < METRIC_TOL);
            let inv = diamond_distance_unitaries(&u.adjoint(), &v.adjoint()).unwrap();
            assert!((inv - uv).abs() < METRIC_TOL);
        }
    }
}
