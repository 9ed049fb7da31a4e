use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).display().to_string()
}

fn infocorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infocorr"))
        .args(args)
        .env_remove("INFOCORR_WORKERS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn classical_bound_examples() {
    let f1 = data("f1.json");
    let f2 = data("f2.json");
    let sc = data("scenario_322.json");
    for (w, alpha, want) in [(&f1, "1", 3.0), (&f2, "1", 4.0), (&f1, "0", 1.0)] {
        let v = json(&infocorr(&["classical-bound", "--witness", w, "--scenario", &sc, "--alpha", alpha, "--check"]));
        assert!((v["value"].as_f64().unwrap() - want).abs() < 1e-9);
        assert_eq!(v["valid"], true);
    }
}

#[test]
fn info_examples() {
    for (file, bits) in [("eq12_ensemble.json", 1.0), ("orthogonal_pair.json", 1.0), ("e0_ensemble.json", 1.0)] {
        let v = json(&infocorr(&["info", "--ensemble", &data(file), "--check"]));
        assert!((v["bits"].as_f64().unwrap() - bits).abs() < 1e-6, "{file}");
    }
    let v = json(&infocorr(&["info", "--ensemble", &data("eq12_ensemble.json")]));
    assert_eq!(v["tight"], true);
    assert!((v["eigen_bound"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn curve_columns_and_determinism() {
    let args = [
        "curve",
        "--witness",
        &data("f1.json"),
        "--scenario",
        &data("scenario_322.json"),
        "--grid",
        "0,0.5,1,1.3,max",
        "--check",
    ];
    let a = infocorr(&args);
    let b = infocorr(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "alpha,classical_bound,quantum_lower_bound,di_upper_bound");
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        assert!((v[1] - (2f64.powf(v[0] + 1.0) - 1.0)).abs() < 1e-9);
        assert!(v[3] >= v[2] - 1e-9 && v[2] >= v[1] - 1e-9);
        if v[0] == 1.0 {
            assert!(v[2] >= 3.8284);
        }
    }
}

#[test]
fn seesaw_is_reproducible_with_workers() {
    let args = |workers: &'static str| {
        vec![
            "seesaw".to_string(),
            "--witness".into(),
            data("f1.json"),
            "--scenario".into(),
            data("scenario_322.json"),
            "--alpha".into(),
            "0.8".into(),
            "--restarts".into(),
            "3".into(),
            "--seed".into(),
            "4".into(),
            "--workers".into(),
            workers.into(),
            "--check".into(),
        ]
    };
    let run = |w| {
        let a = args(w);
        infocorr(&a.iter().map(String::as_str).collect::<Vec<_>>())
    };
    let one = run("1");
    let two = run("2");
    assert_eq!(one.stdout, two.stdout);
    let v = json(&one);
    assert!(v["info"].as_f64().unwrap() <= 0.8 + 1e-4);
}

#[test]
fn membership_di_bound_rac_and_out_file() {
    let v = json(&infocorr(&["membership", "--behavior", &data("relay_f1_behavior.json"), "--check"]));
    assert!((v["di_bits"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("di.csv");
    let status = infocorr(&[
        "di-bound",
        "--witness",
        &data("f1.json"),
        "--scenario",
        &data("scenario_322.json"),
        "--values",
        "1,5",
        "--out",
        out.to_str().unwrap(),
        "--check",
    ]);
    assert!(status.status.success() && status.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("value,alpha_min\n1,0\n5,1"));
    let rac = infocorr(&["rac", "--check"]);
    assert!(rac.status.success());
    assert!(String::from_utf8(rac.stdout).unwrap().contains("4,worst_case,0.75,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(infocorr(&["info", "--ensemble", bad.to_str().unwrap()]).status.code(), Some(3));

    let big = dir.path().join("big.json");
    std::fs::write(&big, r#"{"n": 6, "l": 3, "k": 3}"#).unwrap();
    let zeros = dir.path().join("zero.json");
    let coeffs: Vec<Vec<Vec<f64>>> = vec![vec![vec![0.0; 3]; 3]; 6];
    std::fs::write(&zeros, serde_json::json!({ "coefficients": coeffs }).to_string()).unwrap();
    let code = infocorr(&["classical-bound", "--witness", zeros.to_str().unwrap(), "--scenario", big.to_str().unwrap(), "--alpha", "1"])
        .status
        .code();
    assert_eq!(code, Some(4));

    let sc = data("scenario_322.json");
    let f1 = data("f1.json");
    assert_eq!(infocorr(&["classical-bound", "--witness", &f1, "--scenario", &sc, "--alpha=-1"]).status.code(), Some(6));
    assert_eq!(infocorr(&["seesaw", "--witness", &f1, "--scenario", &sc, "--alpha", "1", "--dim", "9"]).status.code(), Some(6));
    assert_eq!(infocorr(&["info", "--ensemble", "/nonexistent/e.json"]).status.code(), Some(1));
    assert_eq!(infocorr(&["info"]).status.code(), Some(2));
}
