use polarforge::code::{AVector, CodeSpec};
use polarforge::construct::{
    bhattacharyya_bec, construct_bhattacharyya, construct_bhattacharyya_bec, construct_rm, design_snr_to_epsilon,
};
use proptest::prelude::*;

/// Z of bit-channel `i` by walking its binary expansion from the MSB:
/// a 0 takes the degraded branch, a 1 the upgraded one.
fn z_by_path(i: usize, n: u32, eps: f64) -> f64 {
    let mut z = eps;
    for level in (0..n).rev() {
        z = if i >> level & 1 == 0 { 2.0 * z - z * z } else { z * z };
    }
    z
}

#[test]
fn n3_half_erasure_vector() {
    let expected = [0.99609, 0.87891, 0.80859, 0.31641, 0.68359, 0.19141, 0.12109, 0.00391];
    let z = bhattacharyya_bec::<f64>(3, 0.5).unwrap();
    for (i, (&got, &want)) in z.z().iter().zip(&expected).enumerate() {
        assert!((got - want).abs() < 1e-5, "index {i}: {got} vs {want}");
        assert!((got - z_by_path(i, 3, 0.5)).abs() < 1e-15);
    }
}

#[test]
fn constructions_match_examples() {
    let p84 = CodeSpec::new(8, 4).unwrap();
    let expected = AVector::from_one_based(8, &[4, 6, 7, 8]).unwrap();
    assert_eq!(construct_bhattacharyya_bec(&p84, 0.5).unwrap(), expected);
    assert_eq!(construct_rm(&p84).unwrap(), expected);
    let p41 = CodeSpec::new(4, 1).unwrap();
    assert_eq!(
        construct_bhattacharyya_bec(&p41, 0.5).unwrap().one_based_info_set(),
        vec![4]
    );
    let p81 = CodeSpec::new(8, 1).unwrap();
    assert_eq!(construct_rm(&p81).unwrap().one_based_info_set(), vec![8]);
    let full = CodeSpec::new(16, 16).unwrap();
    assert_eq!(construct_rm(&full).unwrap().ones(), 16);
    assert_eq!(construct_bhattacharyya(&full, 1.0).unwrap().ones(), 16);
}

#[test]
fn design_snr_examples() {
    let e = design_snr_to_epsilon(3.6, 0.5).unwrap();
    assert!((0.316..=0.320).contains(&e), "{e}");
    assert!((design_snr_to_epsilon(0.0, 0.5).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
    assert!(design_snr_to_epsilon(0.0, 1e-9).unwrap() > 0.999_999);
    assert!(design_snr_to_epsilon(0.0, 0.0).is_err());
    assert!(design_snr_to_epsilon(0.0, 1.5).is_err());
}

proptest! {
    #[test]
    fn mean_is_conserved(n in 0u32..=12, eps in 0.0f64..=1.0) {
        let z = bhattacharyya_bec::<f64>(n, eps).unwrap();
        prop_assert!((z.mean() - eps).abs() < 1e-12);
        prop_assert!(z.z().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn entries_match_path_walk(n in 0u32..=8, eps in 0.0f64..=1.0) {
        let z = bhattacharyya_bec::<f64>(n, eps).unwrap();
        for i in 0..1usize << n {
            prop_assert!((z.z()[i] - z_by_path(i, n, eps)).abs() < 1e-12);
        }
    }

    #[test]
    fn degradation_ordering(n in 1u32..=8, eps in 0.0f64..=1.0) {
        // Children of parent j at level n are 2j (minus) and 2j+1 (plus).
        let parent = bhattacharyya_bec::<f64>(n - 1, eps).unwrap();
        let child = bhattacharyya_bec::<f64>(n, eps).unwrap();
        for j in 0..parent.len() {
            prop_assert!(child.z()[2 * j + 1] <= parent.z()[j] + 1e-15);
            prop_assert!(parent.z()[j] <= child.z()[2 * j] + 1e-15);
        }
    }

    #[test]
    fn construction_popcount_and_determinism(n in 1u32..=10, frac in 0.0f64..=1.0, db in -2.0f64..6.0) {
        let len = 1usize << n;
        let k = ((len as f64 * frac).round() as usize).clamp(1, len);
        let spec = CodeSpec::new(len, k).unwrap();
        let a = construct_bhattacharyya(&spec, db).unwrap();
        prop_assert_eq!(a.ones(), k);
        prop_assert_eq!(a, construct_bhattacharyya(&spec, db).unwrap());
        prop_assert_eq!(construct_rm(&spec).unwrap().ones(), k);
    }
}
