use ktrace_core::concavity::{
    chord_gap, homogeneity_check, integrate_s, jensen_multiconcave_gap, lieb_lemma_gap, objective,
    scalar_holder_check, second_directional_derivative, trace_ineq_gap, Form, ObjectiveSpec,
};
use ktrace_core::ensemble::Summand;
use ktrace_core::hermitian::HermitianMatrix;
use ktrace_core::ktrace::trace_k_eigen;
use ktrace_core::random::InstanceRng;
use proptest::prelude::*;

fn spec(h: HermitianMatrix, k: usize, form: Form) -> ObjectiveSpec {
    ObjectiveSpec::new(h, k, form).unwrap()
}

#[test]
fn zero_h_root_form_is_ktrace_root() {
    let a = InstanceRng::new(501, 0).pd(4);
    for k in 1..=4 {
        let f = objective(&spec(HermitianMatrix::zeros(4), k, Form::Root), &a).unwrap();
        let want = trace_k_eigen(&a, k).unwrap().value.powf(1.0 / k as f64);
        assert!((f - want).abs() <= 1e-10 * want, "k={k}");
    }
}

#[test]
fn top_order_is_determinant_root() {
    let mut rng = InstanceRng::new(502, 0);
    let (h, a) = (rng.hermitian(4), rng.pd(4));
    let f = objective(&spec(h.clone(), 4, Form::Root), &a).unwrap();
    let det: f64 = a.eigenvalues().unwrap().iter().product();
    let want = det.powf(0.25) * (h.trace() / 4.0).exp();
    assert!((f - want).abs() <= 1e-10 * want);
}

#[test]
fn second_difference_along_a_is_flat() {
    let mut rng = InstanceRng::new(503, 0);
    let (h, a) = (rng.hermitian(4), rng.pd(4));
    let step = 1e-3 * a.eigenvalues().unwrap().iter().cloned().fold(f64::INFINITY, f64::min);
    for k in 1..=4 {
        let d = second_directional_derivative(&spec(h.clone(), k, Form::Root), &a, &a, step).unwrap();
        assert!(d.value.abs() <= 1e-4 * d.scale / step.max(1e-3), "k={k} {d:?}");
    }
}

#[test]
fn random_second_difference_nonpositive() {
    let mut rng = InstanceRng::new(504, 0);
    for i in 0..20 {
        let (h, a, c) = (rng.hermitian(4), rng.pd(4), rng.hermitian_unit(4));
        let lmin = a.eigenvalues().unwrap().iter().cloned().fold(f64::INFINITY, f64::min);
        let c = c.scale(lmin);
        let k = 1 + i % 4;
        for form in [Form::Root, Form::Log] {
            let d = second_directional_derivative(&spec(h.clone(), k, form), &a, &c, 1e-3).unwrap();
            assert!(d.value <= 1e-6 * d.scale, "instance {i} {form:?} {d:?}");
        }
    }
}

#[test]
fn chord_inequality_holds() {
    let mut rng = InstanceRng::new(505, 0);
    for _ in 0..20 {
        let (h, a1, a2) = (rng.hermitian(4), rng.pd(4), rng.pd(4));
        let tau = rng.unit();
        let g = chord_gap(&spec(h, 2, Form::Root), &a1, &a2, tau).unwrap();
        assert!(g.as_gap().nonnegative(1e-10), "{g:?}");
    }
}

#[test]
fn step_leaving_cone_is_a_domain_error() {
    let a = HermitianMatrix::from_diagonal(&[1.0, 1e-6]);
    let c = HermitianMatrix::from_diagonal(&[0.0, 1.0]);
    let err = second_directional_derivative(&spec(HermitianMatrix::zeros(2), 1, Form::Root), &a, &c, 1e-3);
    assert!(matches!(err, Err(ktrace_core::Error::Domain { .. })));
}

#[test]
fn lieb_lemma_n5() {
    let mut rng = InstanceRng::new(506, 0);
    for _ in 0..10 {
        let (a, c, b) = (rng.pd(5), rng.hermitian(5), rng.psd_rank(5, 3));
        assert!(lieb_lemma_gap(&a, &c, &b).unwrap().nonpositive(1e-7));
    }
}

#[test]
fn trace_inequality_at_order_one_is_lieb() {
    let mut rng = InstanceRng::new(507, 0);
    let (a, b, c) = (rng.pd(4), rng.pd(4), rng.hermitian(4));
    let t = trace_ineq_gap(&a, &b, &c, 1).unwrap();
    let l = lieb_lemma_gap(&a, &c, &b).unwrap();
    assert!(t.rhs.abs() <= 1e-12);
    assert!((t.lhs - l.gap).abs() <= 1e-8 * l.scale);
    for k in 2..=4 {
        assert!(trace_ineq_gap(&a, &b, &c, k).unwrap().nonpositive(1e-7), "k={k}");
    }
}

#[test]
fn quadrature_of_polynomial() {
    let v = integrate_s(|s| Ok(3.0 * s * s)).unwrap();
    assert!((v - 1.0).abs() <= 1e-14);
}

#[test]
fn jensen_gap_nonnegative() {
    let mut rng = InstanceRng::new(508, 0);
    let summands: Vec<Summand> = (0..3)
        .map(|_| Summand::from_pairs(vec![(0.3, rng.pd(3)), (0.7, rng.pd(3))]))
        .collect();
    for k in 1..=3 {
        for form in [Form::Root, Form::Log] {
            assert!(jensen_multiconcave_gap(&summands, k, form).unwrap().nonnegative(1e-9));
        }
    }
    let point: Vec<Summand> = (0..2).map(|_| Summand::point_mass(rng.pd(3))).collect();
    assert!(jensen_multiconcave_gap(&point, 2, Form::Log).unwrap().within(1e-10));
}

#[test]
fn homogeneity_at_scale() {
    let mut rng = InstanceRng::new(509, 0);
    let (h, a) = (rng.hermitian(4), rng.pd(4));
    for k in 1..=4 {
        for form in [Form::Root, Form::Log] {
            let g = homogeneity_check(&spec(h.clone(), k, form), &a, 3.7).unwrap();
            assert!(g.within(1e-10), "k={k} {form:?} {g:?}");
        }
    }
}

#[test]
fn rejects_bad_inputs() {
    assert!(ObjectiveSpec::new(HermitianMatrix::zeros(3), 4, Form::Root).is_err());
    assert!(scalar_holder_check(-1.0, 0.0, 1.0, 1.0, 0.5).is_err());
    let s = spec(HermitianMatrix::zeros(2), 1, Form::Log);
    assert!(homogeneity_check(&s, &HermitianMatrix::identity(2), 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scalar_holder(a in 0.0f64..10.0, b in 0.0f64..10.0, c in 0.0f64..10.0, d in 0.0f64..10.0, s in 0.0f64..=1.0) {
        prop_assert!(scalar_holder_check(a, b, c, d, s).unwrap().nonnegative(1e-12));
    }

    #[test]
    fn root_form_is_concave(seed in any::<u64>(), n in 1usize..5, kk in 0usize..5, tau in 0.0f64..=1.0) {
        let mut rng = InstanceRng::new(seed, 0);
        let (h, a1, a2) = (rng.hermitian(n), rng.pd(n), rng.pd(n));
        let g = chord_gap(&spec(h, 1 + kk % n, Form::Root), &a1, &a2, tau).unwrap();
        prop_assert!(g.as_gap().nonnegative(1e-10));
    }
}
