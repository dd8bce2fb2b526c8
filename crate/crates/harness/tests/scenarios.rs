use std::path::Path;

use syncsub_harness::report::CSV_HEADER;
use syncsub_harness::{
    emit_report, parse_scenario, parse_scenario_str, run_scenario, Format, HarnessError, Kind,
    Report,
};

fn bundled(name: &str) -> syncsub_harness::Scenario {
    parse_scenario(
        &Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("scenarios")
            .join(name),
    )
    .unwrap()
}

fn field_of(err: HarnessError) -> String {
    match err {
        HarnessError::Validation { field, .. } => field,
        HarnessError::Parse { path, .. } => path,
        other => panic!("unexpected error {other:?}"),
    }
}

const DRIFT: &str = r#"{
  "name": "d", "kind": "drift", "seed": 3,
  "clock_a": {"labels": [0, 1]}, "clock_b": {"labels": [0, 1]},
  "perturbation": {"base": {"random_compatible": {}}, "direction": "random", "strength": 0.02},
  "times": [-2, -1, 0, 1, 2]
}"#;

#[test]
fn compat_scenario_parses_as_compat() {
    let s = bundled("ex55_compat.json");
    assert_eq!(s.kind(), Kind::Compat);
    assert_eq!(s.spec.hamiltonians.as_ref().unwrap().len(), 4);
    assert_eq!(s.digest.len(), 64);
}

#[test]
fn empty_input_is_a_parse_error() {
    let e = parse_scenario_str("").unwrap_err();
    assert!(matches!(e, HarnessError::Parse { .. }));
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn negative_strength_names_the_field() {
    let text = DRIFT.replace("0.02", "-1");
    let e = parse_scenario_str(&text).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    assert_eq!(field_of(e), "perturbation.strength");
}

#[test]
fn parse_errors_carry_path_and_position() {
    let text = DRIFT.replace(
        "\"labels\": [0, 1]}, \"clock_b\"",
        "\"labels\": [0, \"x\"]}, \"clock_b\"",
    );
    match parse_scenario_str(&text).unwrap_err() {
        HarnessError::Parse { path, line, .. } => {
            assert_eq!(path, "clock_a.labels[1]");
            assert_eq!(line, 3);
        }
        other => panic!("{other:?}"),
    }
    let unknown = parse_scenario_str(r#"{"name": "x", "kind": "weather"}"#).unwrap_err();
    assert_eq!(field_of(unknown), "kind");
    let typo = parse_scenario_str(&DRIFT.replace("\"times\"", "\"timez\"")).unwrap_err();
    assert_eq!(field_of(typo), "timez");
}

#[test]
fn missing_and_inconsistent_fields() {
    let no_times = DRIFT.replace(",\n  \"times\": [-2, -1, 0, 1, 2]", "");
    assert_eq!(
        field_of(parse_scenario_str(&no_times).unwrap_err()),
        "times"
    );

    let mismatch = r#"{"name": "k", "kind": "kernel",
        "clock_a": {"labels": [0, 1]}, "clock_b": {"labels": [0, 1]},
        "hamiltonian": {"matrix": {"diag": [1, 2, 3]}}}"#;
    assert_eq!(
        field_of(parse_scenario_str(mismatch).unwrap_err()),
        "hamiltonian.matrix"
    );

    let not_hermitian = r#"{"name": "c", "kind": "compat", "clock": {"labels": [0, 1]},
        "hamiltonians": [{"name": "h", "hamiltonian": {"matrix": {"rows": [[0, 1], [0, 0]]}}}]}"#;
    assert_eq!(
        field_of(parse_scenario_str(not_hermitian).unwrap_err()),
        "hamiltonians[0].hamiltonian.matrix"
    );

    let short = r#"{"name": "c", "kind": "compat", "clock": {"labels": [0, 1]},
        "hamiltonians": [{"name": "h", "hamiltonian": {"matrix": {"dim": 2, "entries": [[1, 0]]}}}]}"#;
    assert_eq!(
        field_of(parse_scenario_str(short).unwrap_err()),
        "hamiltonians[0].hamiltonian.matrix.entries"
    );

    let overflow = DRIFT.replace("0.02", "1e999");
    assert!(parse_scenario_str(&overflow).is_err());

    let bad_tol = DRIFT.replace(
        "\"seed\": 3,",
        "\"seed\": 3, \"tolerances\": {\"compat\": -1},",
    );
    assert_eq!(
        field_of(parse_scenario_str(&bad_tol).unwrap_err()),
        "tolerances.compat"
    );
}

#[test]
fn group_literals_are_checked() {
    let bad_label = r#"{"name": "g", "kind": "group", "group": "Z2xZ2",
        "rep": {"generators": {"q": {"diag": [1, -1]}}}}"#;
    assert_eq!(
        field_of(parse_scenario_str(bad_label).unwrap_err()),
        "rep_a.generators.q"
    );

    let table_without_chars = r#"{"name": "g", "kind": "group",
        "group": {"mult_table": [[0, 1], [1, 0]]},
        "rep": {"elements": [{"diag": [1]}, {"diag": [-1]}]}}"#;
    assert_eq!(
        field_of(parse_scenario_str(table_without_chars).unwrap_err()),
        "characters"
    );

    let asymmetric = r#"{"name": "g", "kind": "group", "group": "Z3",
        "rep": {"regular": true}, "class_function_a": [0, 1, 2]}"#;
    let s = parse_scenario_str(asymmetric).unwrap();
    assert_eq!(
        field_of(run_scenario(&s, None).unwrap_err()),
        "class_function_a"
    );
}

#[test]
fn explicit_group_table_with_characters() {
    let text = r#"{"name": "z2", "kind": "group",
        "group": {"labels": ["e", "s"], "mult_table": [[0, 1], [1, 0]]},
        "characters": [
          {"name": "plus", "dim": 1, "characters": [1, 1]},
          {"name": "minus", "dim": 1, "characters": [1, [-1, 0]]}
        ],
        "rep": {"generators": {"s": {"rows": [[0, 1], [1, 0]]}}},
        "class_function_a": [0, 1]}"#;
    let r = run_scenario(&parse_scenario_str(text).unwrap(), None).unwrap();
    assert!(r.passed, "{:?}", r.verdicts);
    let rep = &r.group.unwrap().reps[0];
    let mults: Vec<usize> = rep.multiplicities.iter().map(|m| m.multiplicity).collect();
    assert_eq!(mults, vec![1, 1]);
    // T = ρ(s) = σ_x acts as ±1 on the two irreps
    let scalars: Vec<f64> = rep
        .schur
        .as_ref()
        .unwrap()
        .entries
        .iter()
        .map(|e| e.scalar.unwrap())
        .collect();
    assert!((scalars[0] - 1.0).abs() < 1e-12 && (scalars[1] + 1.0).abs() < 1e-12);
}

#[test]
fn invalid_representation_is_a_verdict() {
    // σ_x is not a homomorphic image of the generator of Z3
    let text = r#"{"name": "bad", "kind": "group", "group": "Z3",
        "rep": {"elements": [{"diag": [1, 1]}, {"rows": [[0, 1], [1, 0]]}, {"rows": [[0, 1], [1, 0]]}]}}"#;
    let r = run_scenario(&parse_scenario_str(text).unwrap(), None).unwrap();
    assert!(!r.passed);
    assert!(!r.verdicts["rep_a_valid"]);
}

#[test]
fn compat_verdicts() {
    let r = run_scenario(&bundled("ex55_compat.json"), None).unwrap();
    let classes: Vec<&str> = r
        .compat
        .as_ref()
        .unwrap()
        .iter()
        .map(|c| c.class.as_str())
        .collect();
    assert_eq!(
        classes,
        ["diagonal", "diagonal", "diagonal", "incompatible"]
    );
    assert!(r.passed);
    assert!(r.epsilon.is_none());
}

#[test]
fn kernel_scenario_basis() {
    let r = run_scenario(&bundled("ex74_kernel.json"), None).unwrap();
    let k = r.kernel.unwrap();
    assert_eq!(k.dim, 2);
    // spans |00⟩ and |11⟩: no weight on |01⟩, |10⟩
    for b in &k.basis {
        assert!(b[1][0].abs() + b[1][1].abs() + b[2][0].abs() + b[2][1].abs() < 1e-12);
    }
    assert_eq!(r.epsilon, Some(0.0));
}

#[test]
fn zero_strength_drift_stays_in_kernel() {
    let s = parse_scenario_str(&DRIFT.replace("0.02", "0")).unwrap();
    let r = run_scenario(&s, None).unwrap();
    assert!(r.verdicts["drift_bound_ok"]);
    assert!(r.epsilon.unwrap() <= 1e-12);
    assert!(r.series.unwrap().drift.iter().all(|&d| d <= 1e-10));
}

#[test]
fn seed_override_changes_only_random_parts() {
    let s = parse_scenario_str(DRIFT).unwrap();
    let a = run_scenario(&s, None).unwrap();
    let b = run_scenario(&s, Some(3)).unwrap();
    let c = run_scenario(&s, Some(4)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.series, c.series);
    assert_eq!(c.seed, 4);
}

#[test]
fn csv_layout() {
    let r = run_scenario(&parse_scenario_str(DRIFT).unwrap(), None).unwrap();
    let csv = String::from_utf8(emit_report(&r, Format::Csv).unwrap()).unwrap();
    let lines: Vec<&str> = csv.split('\n').collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 5 + 2);
    assert_eq!(lines[6], "");
    assert_eq!(lines[3], "0.0000000000000000,0.0000000000000000,1.0000000000000000,0.0000000000000000,1.0000000000000000");
    for line in &lines[1..6] {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 5);
        for cell in cells {
            assert_eq!(significant_digits(cell), 17, "{cell}");
        }
    }
}

fn significant_digits(cell: &str) -> usize {
    let mantissa = cell.split('e').next().unwrap();
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let trimmed = digits.trim_start_matches('0');
    if trimmed.is_empty() {
        digits.len()
    } else {
        trimmed.len()
    }
}

#[test]
fn csv_needs_a_series() {
    let r = run_scenario(&bundled("ex55_compat.json"), None).unwrap();
    let e = emit_report(&r, Format::Csv).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn json_round_trip() {
    for name in [
        "ex55_compat.json",
        "ex74_kernel.json",
        "ex74_group.json",
        "s3_containment.json",
        "drift_perturbed.json",
    ] {
        let r = run_scenario(&bundled(name), None).unwrap();
        let bytes = emit_report(&r, Format::Json).unwrap();
        let back: Report = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(back, r, "{name}");
        assert_eq!(emit_report(&back, Format::Json).unwrap(), bytes);
    }
}

#[test]
fn json_carries_provenance() {
    let r = run_scenario(&bundled("drift_perturbed.json"), None).unwrap();
    let v: serde_json::Value =
        serde_json::from_slice(&emit_report(&r, Format::Json).unwrap()).unwrap();
    for key in [
        "epsilon",
        "tolerances",
        "verdicts",
        "library_version",
        "input_digest",
        "generator",
        "seed",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["generator"], "chacha8/seed_from_u64");
    assert_eq!(v["tolerances"]["match"], 1e-9);
}

#[test]
fn text_output_is_a_table() {
    let r = run_scenario(&bundled("ex55_compat.json"), None).unwrap();
    let text = String::from_utf8(emit_report(&r, Format::Text).unwrap()).unwrap();
    assert!(text.contains("H4"));
    assert!(text.contains("incompatible"));
    assert_eq!(
        text,
        String::from_utf8(emit_report(&r, Format::Text).unwrap()).unwrap()
    );
}

#[test]
fn tolerance_override_applies() {
    let mut s = bundled("ex55_compat.json");
    s.set_tolerance("compat", 2.0).unwrap();
    let r = run_scenario(&s, None).unwrap();
    // with a huge tolerance H4 counts as compatible, contradicting its expectation
    assert!(!r.verdicts["class_H4"]);
    assert!(!r.passed);
    assert_eq!(r.tolerances["compat"], 2.0);
    assert!(s.set_tolerance("nonsense", 1.0).is_err());
}
