use ktrace_core::hermitian::HermitianMatrix;
use ktrace_core::ktrace::{
    check_cyclic, elementary_symmetric, ktrace_brackets, ktrace_scale, trace_k_charpoly, trace_k_eigen, trace_k_minors,
};
use ktrace_core::linalg::{determinant, CMatrix, C64};
use ktrace_core::random::InstanceRng;
use proptest::prelude::*;

#[test]
fn endpoints_are_trace_and_determinant() {
    let mut rng = InstanceRng::new(201, 0);
    for n in 1..=7 {
        let a = rng.hermitian(n);
        let t1 = trace_k_eigen(&a, 1).unwrap().value;
        assert!((t1 - a.trace()).abs() <= 1e-12 * ktrace_scale(&a, 1).unwrap().max(1.0));
        let tn = trace_k_eigen(&a, n).unwrap().value;
        let det = determinant(a.matrix()).re;
        assert!((tn - det).abs() <= 1e-10 * ktrace_scale(&a, n).unwrap());
    }
}

#[test]
fn hand_value_diagonal() {
    // e_2(1, 2, 3) = 2 + 3 + 6
    let a = HermitianMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
    assert_eq!(trace_k_eigen(&a, 2).unwrap().value, 11.0);
    assert_eq!(trace_k_minors(a.matrix(), 2).unwrap(), C64::new(11.0, 0.0));
    assert!((trace_k_charpoly(a.matrix(), 2).unwrap() - 11.0).norm() < 1e-14);
}

#[test]
fn three_routes_agree_six_by_six() {
    let a = InstanceRng::new(202, 0).hermitian(6);
    for k in 1..=6 {
        let s = ktrace_scale(&a, k).unwrap();
        let e = trace_k_eigen(&a, k).unwrap().value;
        let m = trace_k_minors(a.matrix(), k).unwrap();
        assert!((m - e).norm() <= 1e-10 * s, "k={k}");
    }
}

#[test]
fn charpoly_matches_minors_nonhermitian() {
    let a = InstanceRng::new(203, 0).square(5);
    for k in 1..=5 {
        let m = trace_k_minors(&a, k).unwrap();
        let c = trace_k_charpoly(&a, k).unwrap();
        assert!((m - c).norm() <= 1e-9 * m.norm().max(1.0), "k={k}");
    }
}

#[test]
fn cyclic_invariance() {
    let mut rng = InstanceRng::new(204, 0);
    let (a, b) = (rng.square(4), rng.square(4));
    let v = trace_k_charpoly(&(&a * &b), 2).unwrap().norm();
    assert!(check_cyclic(&a, &b, 2).unwrap() <= 1e-10 * v.max(1.0));
}

#[test]
fn psd_bracket() {
    let a = InstanceRng::new(205, 0).psd_rank(6, 6);
    assert!(ktrace_brackets(&a, 3).unwrap().holds(1e-12));
    assert!(ktrace_brackets(&HermitianMatrix::from_diagonal(&[1.0, -1.0]), 1).is_err());
}

#[test]
fn order_out_of_range() {
    let a = HermitianMatrix::identity(3);
    assert!(trace_k_eigen(&a, 0).is_err());
    assert!(trace_k_eigen(&a, 4).is_err());
    assert!(trace_k_minors(&CMatrix::identity(3, 3), 4).is_err());
}

#[test]
fn recurrence_handles_cancellation() {
    // e_2(1e8, -1e8, 1) = -1e16 + 1e8 - 1e8
    let v = elementary_symmetric(&[1e8, -1e8, 1.0], 2);
    assert_eq!(v, -1e16);
    assert_eq!(elementary_symmetric(&[1.0, 2.0], 3), 0.0);
    assert_eq!(elementary_symmetric(&[5.0], 0), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitary_invariance(seed in any::<u64>(), n in 1usize..7, kk in 0usize..7) {
        let mut rng = InstanceRng::new(seed, 0);
        let a = rng.hermitian(n);
        let k = 1 + kk % n;
        let q = rng.ginibre(n).qr().q();
        let b = a.congruence(&q);
        let s = ktrace_scale(&a, k).unwrap();
        let x = trace_k_eigen(&a, k).unwrap().value;
        let y = trace_k_eigen(&b, k).unwrap().value;
        prop_assert!((x - y).abs() <= 1e-10 * s.max(1e-300));
    }

    #[test]
    fn degree_k_homogeneity(seed in any::<u64>(), n in 1usize..7, kk in 0usize..7, c in -3.0f64..3.0) {
        let a = InstanceRng::new(seed, 1).hermitian(n);
        let k = 1 + kk % n;
        let x = trace_k_eigen(&a.scale(c), k).unwrap().value;
        let y = c.powi(k as i32) * trace_k_eigen(&a, k).unwrap().value;
        let s = c.abs().powi(k as i32) * ktrace_scale(&a, k).unwrap();
        prop_assert!((x - y).abs() <= 1e-12 * s.max(1e-300));
    }

    #[test]
    fn psd_positivity(seed in any::<u64>(), n in 1usize..7, kk in 0usize..7) {
        let a = InstanceRng::new(seed, 2).pd(n);
        let k = 1 + kk % n;
        prop_assert!(trace_k_eigen(&a, k).unwrap().value > 0.0);
        prop_assert!(trace_k_minors(a.matrix(), k).unwrap().re > 0.0);
    }

    #[test]
    fn three_route_agreement(seed in any::<u64>(), n in 1usize..9) {
        let a = InstanceRng::new(seed, 3).hermitian(n);
        for k in 1..=n {
            let s = ktrace_scale(&a, k).unwrap();
            let e = trace_k_eigen(&a, k).unwrap().value;
            let m = trace_k_minors(a.matrix(), k).unwrap();
            let c = trace_k_charpoly(a.matrix(), k).unwrap();
            prop_assert!((m - e).norm() <= 1e-10 * s);
            prop_assert!((c - e).norm() <= 1e-10 * s);
        }
    }
}
