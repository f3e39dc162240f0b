use ktrace_core::ensemble::{EnsembleSpec, Summand};
use ktrace_core::hermitian::HermitianMatrix;
use ktrace_core::Error;

#[test]
fn both_matrix_layouts_parse() {
    let text = r#"{"dimension": 2, "summands": [
        {"atoms": [{"p": 1.0, "matrix": {"re": [[1, 0], [0, 2]], "im": [[0, 1], [-1, 0]]}}]},
        {"atoms": [{"p": 1.0, "matrix": [[[1, 0], [0, 1]], [[0, -1], [2, 0]]]}]}
    ]}"#;
    let e = EnsembleSpec::from_json_str(text).unwrap();
    assert_eq!(e.summands[0].atoms[0].matrix, e.summands[1].atoms[0].matrix);
    assert!(e.c.is_none());
}

#[test]
fn family_entry_expands() {
    let text = r#"{"dimension": 4, "summands": [{"family": "er_laplacian", "params": {"n": 4, "p": 0.5}}]}"#;
    let e = EnsembleSpec::from_json_str(text).unwrap();
    assert_eq!(e.m(), 6);
    assert_eq!(e.c, Some(2.0));
    assert_eq!(e.joint_support_size(), 64);
}

#[test]
fn errors_name_summand_and_atom() {
    let text = r#"{"dimension": 2, "summands": [
        {"atoms": [{"p": 1.0, "matrix": {"re": [[1, 0], [0, 0]]}}]},
        {"atoms": [{"p": 0.5, "matrix": {"re": [[1, 0], [0, 0]]}}, {"p": 0.5, "matrix": {"re": [[1, 2], [0, 0]]}}]}
    ]}"#;
    match EnsembleSpec::from_json_str(text) {
        Err(Error::Validation { summand, atom, .. }) => assert_eq!((summand, atom), (1, Some(1))),
        other => panic!("{other:?}"),
    }
    let text = r#"{"dimension": 2, "summands": [{"atoms": [{"p": 0.3, "matrix": {"re": [[1, 0], [0, 0]]}}]}]}"#;
    assert!(matches!(
        EnsembleSpec::from_json_str(text),
        Err(Error::Validation { summand: 0, atom: None, .. })
    ));
    let text = r#"{"dimension": 2, "summands": [{"family": "wishart", "params": {}}]}"#;
    assert!(EnsembleSpec::from_json_str(text).is_err());
    assert!(EnsembleSpec::from_json_str("{").is_err());
}

#[test]
fn spectral_window_enforced() {
    let s = Summand::point_mass(HermitianMatrix::from_diagonal(&[1.5, -0.1]));
    assert!(matches!(
        EnsembleSpec::new(2, vec![s.clone()], Some(2.0)),
        Err(Error::Validation { summand: 0, atom: Some(0), .. })
    ));
    let e = EnsembleSpec::new(2, vec![s], None).unwrap();
    assert!(!e.psd);
    assert!(e.require_c().is_err());
}

#[test]
fn file_round_trip() {
    let s = Summand::from_pairs(vec![
        (0.25, HermitianMatrix::from_diagonal(&[1.0, 0.5])),
        (0.75, HermitianMatrix::zeros(2)),
    ]);
    let e = EnsembleSpec::new(2, vec![s.clone(), s], Some(1.0)).unwrap();
    let text = serde_json::to_string_pretty(&e.to_file()).unwrap();
    assert!(text.contains("\"re\""));
    assert_eq!(EnsembleSpec::from_json_str(&text).unwrap(), e);
}
