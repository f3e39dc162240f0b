use ktrace_core::hermitian::HermitianMatrix;
use ktrace_core::ktrace::trace_k_eigen;
use ktrace_core::linalg::{binomial, trace, CMatrix, C64};
use ktrace_core::mixed::{
    af_gap, bm_concavity_gap, general_af_gap, mixed_disc_bruteforce, mixed_disc_complex, mixed_disc_via_wedge,
    pad_with_identity,
};
use ktrace_core::random::InstanceRng;
use proptest::prelude::*;

#[test]
fn two_by_two_closed_form() {
    let mut rng = InstanceRng::new(401, 0);
    let (a, b) = (rng.hermitian(2).into_matrix(), rng.hermitian(2).into_matrix());
    let want = (trace(&a) * trace(&b) - trace(&(&a * &b))) / 2.0;
    assert!((mixed_disc_complex(&[a, b]).unwrap() - want).norm() <= 1e-14);
}

#[test]
fn hand_value_diagonal() {
    // D(diag(1,2), diag(3,4)) = (1*4 + 2*3) / 2
    let a = HermitianMatrix::from_diagonal(&[1.0, 2.0]).into_matrix();
    let b = HermitianMatrix::from_diagonal(&[3.0, 4.0]).into_matrix();
    let v = mixed_disc_bruteforce(&[a, b]).unwrap();
    assert_eq!(v.value, 5.0);
    assert_eq!(v.arguments, "[A1, A2]");
}

#[test]
fn copies_with_identities_give_normalized_ktrace() {
    let a = InstanceRng::new(402, 0).pd(5);
    for k in 1..=5 {
        let d = mixed_disc_complex(&pad_with_identity(&vec![a.matrix().clone(); k], 5)).unwrap().re;
        let t = trace_k_eigen(&a, k).unwrap().value / binomial(5, k) as f64;
        assert!((d - t).abs() <= 1e-10 * t, "k={k}");
    }
}

#[test]
fn wedge_route_n5_k3() {
    let mut rng = InstanceRng::new(403, 0);
    let mats: Vec<CMatrix> = (0..3).map(|_| rng.hermitian(5).into_matrix()).collect();
    let w = mixed_disc_via_wedge(&mats, 5).unwrap().value;
    let b = mixed_disc_complex(&pad_with_identity(&mats, 5)).unwrap().re;
    assert!((w - b).abs() <= 1e-9 * b.abs().max(1.0));
}

#[test]
fn af_random_instance() {
    let mut rng = InstanceRng::new(404, 0);
    let a = rng.pd(4);
    let b = rng.hermitian(4);
    let rest = vec![rng.pd(4), rng.pd(4)];
    assert!(af_gap(&a, &b, &rest).unwrap().nonnegative(1e-9));
    let g = af_gap(&a, &a.scale(0.7), &rest).unwrap();
    assert!(g.within(1e-10));
}

#[test]
fn general_af_and_bm_instances() {
    let mut rng = InstanceRng::new(405, 0);
    let (a, b) = (rng.pd(4), rng.pd(4));
    let rest = vec![rng.pd(4), rng.pd(4)];
    assert!(general_af_gap(&a, &b, &rest, 1).unwrap().nonnegative(1e-9));
    let (p, q) = (rng.psd_rank(4, 3), rng.psd_rank(4, 4));
    assert!(bm_concavity_gap(&p, &q, &rest, 0.5).unwrap().nonnegative(1e-9));
}

#[test]
fn errors() {
    assert!(mixed_disc_complex(&[]).is_err());
    let a = CMatrix::identity(2, 2);
    assert!(mixed_disc_complex(&[a.clone(), CMatrix::identity(3, 3)]).is_err());
    assert!(mixed_disc_via_wedge(&[CMatrix::identity(3, 3)], 2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symmetric_under_permutation(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = InstanceRng::new(seed, 0);
        let mats: Vec<CMatrix> = (0..n).map(|_| rng.square(n)).collect();
        let mut rev = mats.clone();
        rev.reverse();
        rev.swap(0, n / 2);
        let x = mixed_disc_complex(&mats).unwrap();
        let y = mixed_disc_complex(&rev).unwrap();
        let scale: f64 = mats.iter().map(|m| m.norm()).product();
        prop_assert!((x - y).norm() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn multilinear_in_each_slot(seed in any::<u64>(), n in 2usize..6, s in -2.0f64..2.0, slot in 0usize..6) {
        let mut rng = InstanceRng::new(seed, 1);
        let slot = slot % n;
        let mats: Vec<CMatrix> = (0..n).map(|_| rng.square(n)).collect();
        let z = rng.square(n);
        let mut comb = mats.clone();
        comb[slot] = &mats[slot] * C64::new(s, 0.0) + &z;
        let mut other = mats.clone();
        other[slot] = z;
        let lhs = mixed_disc_complex(&comb).unwrap();
        let rhs = mixed_disc_complex(&mats).unwrap() * s + mixed_disc_complex(&other).unwrap();
        let scale: f64 = comb.iter().map(|m| m.norm()).product::<f64>() + other.iter().map(|m| m.norm()).product::<f64>();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * scale.max(1.0));
    }

    #[test]
    fn af_holds_for_pd_families(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = InstanceRng::new(seed, 2);
        let rest: Vec<HermitianMatrix> = (0..n - 2).map(|_| rng.pd(n)).collect();
        let (a, b) = (rng.pd(n), rng.hermitian(n));
        prop_assert!(af_gap(&a, &b, &rest).unwrap().nonnegative(1e-9));
    }
}
