use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfwigner")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn field_info_radix_gf8() {
    let out = run(&["--field", "8", "--ordering", "radix", "field-info"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let labels: Vec<&str> = v["ordering_table"].as_array().unwrap().iter().map(|r| r["elem"].as_str().unwrap()).collect();
    assert_eq!(labels, ["0", "t^3", "t^6", "t^4", "t^5", "t^2", "t^1", "1"]);
}

#[test]
fn field_info_prime_field_is_natural() {
    let v = json_of(&run(&["--field", "5", "field-info"]));
    let labels: Vec<&str> = v["ordering_table"].as_array().unwrap().iter().map(|r| r["elem"].as_str().unwrap()).collect();
    assert_eq!(labels, ["0", "1", "2", "3", "4"]);
}

#[test]
fn reducible_polynomial_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.json");
    fs::write(&p, r#"{"p": 2, "n": 2, "poly": [1, 0, 1]}"#).unwrap();
    let out = run(&["--field", p.to_str().unwrap(), "field-info"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reducible"));
}

#[test]
fn kernel_checks_pass() {
    for d in ["3", "4"] {
        let out = run(&["--field", d, "kernel-check"]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json_of(&out)["passed"], Value::Bool(true));
    }
}

#[test]
fn shift_at_zero_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("h.json");
    fs::write(&p, r#"{"h": ["t^1", "0", "0", "0"]}"#).unwrap();
    let out = run(&["--field", "4", "--rotations", &format!("h:{}", p.display()), "kernel-check"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn line_state_grid_is_indicator() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--field", "4", "--state", "line:t^1,t^2", "--out", dir.path().to_str().unwrap(), "wigner"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("wigner.csv")).unwrap();
    let ones = csv.lines().skip(1).flat_map(|l| l.split(',').skip(1).map(str::to_string).collect::<Vec<_>>()).filter(|x| x == "1").count();
    assert_eq!(ones, 4);
    for f in ["wigner.json", "marginals.json", "line_sums.csv"] {
        assert!(dir.path().join(f).exists());
    }
}

#[test]
fn maximally_mixed_grid_is_constant() {
    let v = json_of(&run(&["--field", "3", "--state", "maximally-mixed", "wigner"]));
    for row in v["grid"]["rows_beta_cols_alpha"].as_array().unwrap() {
        for x in row.as_array().unwrap() {
            assert!((x.as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
        }
    }
}

/// A nonzero shift function whose grid equals the canonical one.
fn same_class_partner() -> Vec<String> {
    use gfwigner::field::{make_field, ordering, OrderStrategy};
    use gfwigner::pauli::{DensityMatrix, StateVector};
    use gfwigner::phase_space::{alternate_wigner, shift_from_index, wigner_of_density};
    use gfwigner::rotations::canonical_rotation_set;
    use std::sync::Arc;
    let f = make_field(2, 2, None).unwrap();
    let o = Arc::new(ordering(&f, OrderStrategy::PrimitivePower { primitive: None }).unwrap());
    let r = canonical_rotation_set(&f, None).unwrap();
    let h = num_complex::Complex64::new(0.5f64.sqrt(), 0.0);
    let rho = DensityMatrix::pure(&StateVector::from_terms(&o, &[(gfwigner::Elem::ZERO, h), (gfwigner::Elem::ONE, h)]).unwrap());
    let base = wigner_of_density(&rho, &r).unwrap();
    (1..64)
        .map(|i| shift_from_index(4, i))
        .find(|s| alternate_wigner(&rho, &r, s).unwrap().max_diff(&base).unwrap() < 1e-9)
        .unwrap()
        .iter()
        .map(|&e| f.format(e))
        .collect()
}

#[test]
fn same_class_shifts_give_identical_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let write_h = |name: &str, h: &str| {
        let p = dir.path().join(name);
        fs::write(&p, h).unwrap();
        format!("h:{}", p.display())
    };
    let enumerate = json_of(&run(&["--field", "4", "--state", "gf4-paper-state", "enumerate"]));
    assert_eq!(enumerate["distinct"], 2);
    assert_eq!(enumerate["total_structures"], 64);
    let reps = enumerate["representatives"].as_array().unwrap();
    let base = write_h("a.json", &format!(r#"{{"h": {}}}"#, reps[0]));
    let other = write_h("b.json", &format!(r#"{{"h": {}}}"#, reps[1]));
    let twin = write_h("c.json", &format!(r#"{{"h": {}}}"#, serde_json::to_string(&same_class_partner()).unwrap()));
    let grid = |rot: &str, sub: &str| {
        let out_dir = dir.path().join(sub);
        let o = run(&["--field", "4", "--rotations", rot, "--state", "gf4-paper-state", "--out", out_dir.to_str().unwrap(), "wigner"]);
        assert_eq!(o.status.code(), Some(0));
        fs::read(out_dir.join("wigner.csv")).unwrap()
    };
    let a1 = grid(&base, "a1");
    let a2 = grid(&base, "a2");
    let b = grid(&other, "b");
    let c = grid(&twin, "c");
    assert_eq!(a1, a2);
    assert_eq!(a1, c);
    assert_ne!(a1, b);
}

#[test]
fn enumerate_counts() {
    let v = json_of(&run(&["--field", "4", "--state", "vacuum", "enumerate"]));
    assert_eq!(v["distinct"], 1);
    let out = run(&["--field", "9", "--state", "vacuum", "enumerate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tomography_modes() {
    let v = json_of(&run(&["--field", "4", "--state", "random:7", "tomography"]));
    assert!(v["round_trip_error"].as_f64().unwrap() < 1e-9);
    let a = run(&["--field", "4", "--state", "random:7", "--shots", "1000000", "--seed", "1", "tomography"]);
    let b = run(&["--field", "4", "--state", "random:7", "--shots", "1000000", "--seed", "1", "tomography"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(json_of(&a)["rows"][0]["fidelity"].as_f64().unwrap() > 0.999);
}

#[test]
fn incomplete_tomogram_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--field", "3", "--state", "random:2", "--out", dir.path().to_str().unwrap(), "tomography"]);
    assert_eq!(out.status.code(), Some(0));
    let path = dir.path().join("tomogram.json");
    let mut t: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    t.as_object_mut().unwrap().remove("vertical");
    fs::write(&path, t.to_string()).unwrap();
    let out = run(&["--field", "3", "tomography", "--tomogram", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("incomplete"));
}

#[test]
fn mub_report_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let a = run(&["--field", "9", "--out", d, "mub"]);
    assert_eq!(a.status.code(), Some(0));
    let first = fs::read(dir.path().join("mub_states.json")).unwrap();
    run(&["--field", "9", "--out", d, "mub"]);
    assert_eq!(first, fs::read(dir.path().join("mub_states.json")).unwrap());
}

#[test]
fn unknown_state_is_input_error() {
    assert_eq!(run(&["--field", "4", "--state", "nope", "wigner"]).status.code(), Some(2));
    assert_eq!(run(&["--field", "8", "--state", "gf4-paper-state", "wigner"]).status.code(), Some(2));
    assert_eq!(run(&["--field", "4", "wigner"]).status.code(), Some(2));
}
