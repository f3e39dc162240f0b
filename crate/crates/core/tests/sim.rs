use ktrace_core::bounds::{chernoff_expectation_bounds, ThetaGrid};
use ktrace_core::ensemble::{EnsembleSpec, Summand};
use ktrace_core::hermitian::HermitianMatrix;
use ktrace_core::random::InstanceRng;
use ktrace_core::sim::{edge_laplacian, er_laplacian_ensemble, exhaustive_expectations, sample_sum, MAX_SAMPLES};
use ktrace_core::Error;

fn d(v: &[f64]) -> HermitianMatrix {
    HermitianMatrix::from_diagonal(v)
}

#[test]
fn edge_laplacian_spectrum() {
    let ev = edge_laplacian(5, 1, 3).eigenvalues().unwrap();
    assert!((ev[0] - 2.0).abs() <= 1e-14);
    assert!(ev[1..].iter().all(|v| v.abs() <= 1e-14));
}

#[test]
fn er_expectation_spectrum() {
    let (n, p, w) = (7, 0.3, 2.0);
    let e = er_laplacian_ensemble(n, p, w).unwrap();
    assert_eq!(e.m(), n * (n - 1) / 2);
    assert_eq!(e.c, Some(2.0 * w));
    let ev = e.expectation().eigenvalues().unwrap();
    let big = n as f64 * p * w;
    assert!(ev[..n - 1].iter().all(|v| (v - big).abs() <= 1e-12 * big));
    assert!(ev[n - 1].abs() <= 1e-12);
}

#[test]
fn certain_edges_are_deterministic() {
    let e = er_laplacian_ensemble(4, 1.0, 1.0).unwrap();
    let s = sample_sum(&e, 3, 100, &[1, 3], &[]).unwrap();
    for k in &s.per_k {
        assert_eq!(k.top_stderr, 0.0);
        assert!((k.top_mean - 4.0 * k.k as f64).abs() <= 1e-12);
    }
}

#[test]
fn er_mean_below_chernoff() {
    let e = er_laplacian_ensemble(8, 0.5, 1.0).unwrap();
    let s = sample_sum(&e, 42, 20_000, &[1, 2, 3], &[]).unwrap();
    for k in &s.per_k {
        let (up, lo) = chernoff_expectation_bounds(&e, k.k, &ThetaGrid::default_chernoff()).unwrap();
        // Jensen: E top-k sum >= top-k sum of E Y = 4k
        assert!(k.top_mean + 3.0 * k.top_stderr >= 4.0 * k.k as f64);
        assert!(k.top_mean <= up.bound);
        assert!(k.bottom_mean >= lo.bound);
    }
}

#[test]
fn stderr_scales_with_count() {
    let e = er_laplacian_ensemble(6, 0.5, 1.0).unwrap();
    let a = sample_sum(&e, 11, 10_000, &[1], &[]).unwrap().per_k[0].top_stderr;
    let b = sample_sum(&e, 11, 20_000, &[1], &[]).unwrap().per_k[0].top_stderr;
    let ratio = a / b;
    assert!((ratio / 2f64.sqrt() - 1.0).abs() <= 0.2, "ratio {ratio}");
}

#[test]
fn bernoulli_projector_mean() {
    let p = 0.35;
    let s = Summand::from_pairs(vec![(1.0 - p, HermitianMatrix::zeros(3)), (p, d(&[0.0, 1.0, 0.0]))]);
    let e = EnsembleSpec::new(3, vec![s], Some(1.0)).unwrap();
    let exact = exhaustive_expectations(&e, &[1], &[]).unwrap();
    assert!((exact.per_k[0].top_mean - p).abs() <= 1e-15);
}

#[test]
fn four_atom_hand_average() {
    let s1 = Summand::from_pairs(vec![(0.5, HermitianMatrix::zeros(2)), (0.5, d(&[1.0, 0.0]))]);
    let s2 = Summand::from_pairs(vec![(0.5, HermitianMatrix::zeros(2)), (0.5, d(&[0.0, 2.0]))]);
    let e = EnsembleSpec::new(2, vec![s1, s2], None).unwrap();
    let x = exhaustive_expectations(&e, &[1], &[1.5]).unwrap();
    assert_eq!(x.joint_atoms, 4);
    // atoms: diag(0,0), diag(1,0), diag(0,2), diag(1,2)
    assert!((x.per_k[0].top_mean - 1.25).abs() <= 1e-15);
    assert!((x.per_k[0].bottom_mean - 0.25).abs() <= 1e-15);
    assert!((x.per_k[0].top_tail[0] - 0.5).abs() <= 1e-15);
    assert!((x.per_k[0].bottom_tail[0] - 1.0).abs() <= 1e-15);
}

#[test]
fn exhaustive_matches_monte_carlo() {
    let mut rng = InstanceRng::new(701, 0);
    let summands = (0..3)
        .map(|_| Summand::from_pairs(vec![(0.3, rng.psd_rank(3, 2)), (0.7, rng.psd_rank(3, 1))]))
        .collect();
    let e = EnsembleSpec::new(3, summands, None).unwrap();
    let x = exhaustive_expectations(&e, &[1, 2], &[]).unwrap();
    let s = sample_sum(&e, 5, 40_000, &[1, 2], &[]).unwrap();
    for (a, b) in x.per_k.iter().zip(&s.per_k) {
        assert!((a.top_mean - b.top_mean).abs() <= 4.0 * b.top_stderr, "k={}", a.k);
        assert!((a.bottom_mean - b.bottom_mean).abs() <= 4.0 * b.bottom_stderr, "k={}", a.k);
    }
}

#[test]
fn independent_of_pool_size() {
    let e = er_laplacian_ensemble(6, 0.4, 1.0).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sample_sum(&e, 9, 5_000, &[1, 2], &[1.0, 3.0]).unwrap())
    };
    let a = serde_json::to_string(&run(1)).unwrap();
    let b = serde_json::to_string(&run(8)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn caps_and_arguments() {
    let e = er_laplacian_ensemble(8, 0.5, 1.0).unwrap();
    assert!(matches!(exhaustive_expectations(&e, &[1], &[]), Err(Error::Resource { .. })));
    assert!(matches!(sample_sum(&e, 0, MAX_SAMPLES + 1, &[1], &[]), Err(Error::Resource { .. })));
    assert!(sample_sum(&e, 0, 10, &[9], &[]).is_err());
    assert!(er_laplacian_ensemble(1, 0.5, 1.0).is_err());
    assert!(er_laplacian_ensemble(3, 1.5, 1.0).is_err());
}
