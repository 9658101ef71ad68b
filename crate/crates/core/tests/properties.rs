//! Cross-module invariants checked through the public API only.

use prubench::ensembles::{pauli_group, pfc_measure_zero_state, sample_pfc, FiniteEnsemble};
use prubench::linalg::{diamond_distance_unitaries, haar_unitary, UnitaryMatrix, C64};
use prubench::moments::tpe_distance;
use prubench::stabilizer::{measurement_support, random_clifford, stabilizer_state};
use prubench::{MemoryBudget, RandomSeed};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn diamond_distance_is_a_bounded_invariant_metric(seed in any::<u64>(), d in 1usize..5) {
        let s = RandomSeed::new(seed);
        let [u, v, w] = ["u", "v", "w"].map(|l| haar_unitary(d, s.fork(l)).unwrap());
        let uv = diamond_distance_unitaries(&u, &v).unwrap();
        prop_assert!((0.0..=2.0 + 1e-12).contains(&uv));
        prop_assert!(diamond_distance_unitaries(&u, &u).unwrap() < 1e-9);
        prop_assert!((diamond_distance_unitaries(&w.mul(&u).unwrap(), &w.mul(&v).unwrap()).unwrap() - uv).abs() < 1e-9);
        // A global phase is invisible to the channel.
        prop_assert!(diamond_distance_unitaries(&u, &u.scale_phase(1.3)).unwrap() < 1e-9);
    }

    #[test]
    fn stabilizer_support_matches_dense_amplitudes(seed in any::<u64>(), n in 1usize..6) {
        let tableau = random_clifford(n, RandomSeed::new(seed)).unwrap();
        let support = measurement_support(&tableau);
        let state = stabilizer_state(&tableau).unwrap();
        let weight = 1.0 / (1u64 << support.k_dim()) as f64;
        for (b, amp) in state.iter().enumerate() {
            let p = amp.norm_sqr();
            if support.contains(b as u64) {
                prop_assert!((p - weight).abs() < 1e-9);
            } else {
                prop_assert!(p < 1e-12);
            }
        }
    }

    #[test]
    fn pfc_samples_land_on_nonzero_amplitudes(seed in any::<u64>(), n in 1usize..5) {
        let s = RandomSeed::new(seed);
        let pfc = sample_pfc(n, s.fork("pfc")).unwrap();
        let u = pfc.dense().unwrap();
        for x in pfc_measure_zero_state(&pfc, 32, s.fork("shots")) {
            prop_assert!(u.matrix()[(x as usize, 0)].norm_sqr() > 1e-12);
        }
    }

    #[test]
    fn shifted_pauli_group_stays_an_exact_one_design(seed in any::<u64>()) {
        // Haar moments are invariant under a fixed left shift, so {V·P} is
        // still an exact 1-design for every unitary V.
        let v = haar_unitary(2, RandomSeed::new(seed)).unwrap();
        let shifted: Vec<UnitaryMatrix> = pauli_group(1).unwrap().unitaries().iter().map(|p| v.mul(p).unwrap()).collect();
        let ens = FiniteEnsemble::uniform(shifted).unwrap();
        prop_assert!(tpe_distance(&ens, 1, &MemoryBudget::default()).unwrap() < 1e-9);
    }
}

#[test]
fn identical_seeds_reproduce_identical_draws() {
    let a = haar_unitary(4, RandomSeed::new(11).derive(3)).unwrap();
    let b = haar_unitary(4, RandomSeed::new(11).derive(3)).unwrap();
    let c = haar_unitary(4, RandomSeed::new(11).derive(4)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    let z = UnitaryMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]).unwrap();
    assert!((diamond_distance_unitaries(&UnitaryMatrix::identity(2), &z).unwrap() - 2.0).abs() < 1e-12);
}
