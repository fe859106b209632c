use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn curvident(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvident"))
        .args(args)
        .env_remove("CURVIDENT_THREADS")
        .output()
        .expect("spawn curvident")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn invariants_tables() {
    let o = curvident(&["invariants", "--model", "example5d", "--k", "1", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["invariants"]["tau"], "10");
    assert_eq!(v["invariants"]["r_norm_sq"], "28");
    assert_eq!(v["invariants"]["einstein"], true);
    assert_eq!(v["invariants"]["super_einstein"], false);

    let o = curvident(&["invariants", "--model", "sl3so3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("-15") && text.contains("75"), "{text}");
    let v = json(&curvident(&["invariants", "--model", "sl3so3", "--json"]));
    assert_eq!(
        (v["invariants"]["tau"].as_str(), v["invariants"]["r_norm_sq"].as_str()),
        (Some("-15"), Some("75"))
    );

    let v = json(&curvident(&["invariants", "--model", "flat", "--dim", "5", "--json"]));
    for key in ["tau", "ricci_norm_sq", "r_norm_sq", "r_hat0", "r_ring0"] {
        assert_eq!(v["invariants"][key], "0", "{key}");
    }
    let v = json(&curvident(&[
        "invariants",
        "--model",
        "example6d",
        "--k",
        "1",
        "--json",
    ]));
    assert!(v.get("gauss_bonnet").is_some());
}

#[test]
fn verify_examples() {
    let o = curvident(&["verify", "--model", "example5d", "--k", "1", "--set", "thmA-a"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: pass"));

    let o = curvident(&[
        "verify",
        "--model",
        "example5d",
        "--k",
        "1",
        "--set",
        "thmA-b",
        "--expect-fail",
        "thmA-b",
    ]);
    assert_eq!(code(&o), 0);
    let o = curvident(&[
        "verify",
        "--model",
        "example5d",
        "--k",
        "1",
        "--set",
        "thmA-b",
        "--expect-fail",
        "thmA-b",
        "--json",
    ]);
    let v = json(&o);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["residuals"][0]["is_zero"], false);

    let o = curvident(&["verify", "--model", "example6d", "--k", "1", "--set", "all"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    // an expected failure that does not fail
    let o = curvident(&[
        "verify",
        "--model",
        "example6d",
        "--k",
        "1",
        "--set",
        "thmB-b",
        "--expect-fail",
        "thmB-b",
    ]);
    assert_eq!(code(&o), 1);
    let o = curvident(&[
        "verify",
        "--model",
        "nikolayevsky",
        "--alpha",
        "-1/2",
        "--beta",
        "2",
        "--set",
        "pa5,thmA-b",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn random_check_examples() {
    let o = curvident(&[
        "random-check",
        "--dim",
        "5",
        "--identity",
        "lemma5",
        "-n",
        "6",
        "--seed",
        "7",
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!((v["zero"].as_u64(), v["inputs"].as_str()), (Some(6), Some("einstein")));

    let o = curvident(&[
        "random-check",
        "--dim",
        "6",
        "--identity",
        "thmB-b",
        "-n",
        "3",
        "--seed",
        "7",
        "--json",
    ]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["first_failing_seed"], 7);
    let fails = v["failures"].as_array().unwrap();
    assert_eq!(fails.len(), 3);
    assert!(fails.iter().all(|f| f["witness"].is_object()));

    let o = curvident(&[
        "random-check",
        "--dim",
        "4",
        "--identity",
        "patterson",
        "--r",
        "2",
        "-n",
        "5",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/out.json");
    for args in [
        vec!["invariants", "--model", "torus"],
        vec!["invariants", "--model", "flat"],
        vec!["verify", "--model", "example5d", "--k", "1", "--set", "lemma6"],
        vec!["verify", "--model", "example5d", "--k", "1", "--set", "nope"],
        vec!["verify", "--model", "example5d", "--k", "x"],
        vec!["random-check", "--dim", "5", "--identity", "patterson", "--r", "3"],
        vec!["export", "--model", "sl3so3", "--out", missing.to_str().unwrap()],
        vec![
            "invariants",
            "--model-file",
            dir.path().join("absent.json").to_str().unwrap(),
        ],
        vec!["--threads", "0", "invariants", "--model", "sl3so3"],
    ] {
        let o = curvident(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"), "{args:?}");
    }
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind":"example_5d","params":{"k":"1/0"}}"#).unwrap();
    let o = curvident(&["invariants", "--model-file", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/params/k"));
}

#[test]
fn export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("sl3.json");
    let o = curvident(&["export", "--model", "sl3so3", "--out", a.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(read(&a).contains(r#""tau": "-15""#));

    // explicit components, then re-run from the exported file
    for model in [
        vec!["--model", "example6d", "--k", "1"],
        vec!["--model", "random-einstein", "--dim", "5", "--seed", "3"],
    ] {
        let first = dir.path().join("first.json");
        let second = dir.path().join("second.json");
        let mut args = vec!["export", "--as-explicit", "--out", first.to_str().unwrap()];
        args.extend(&model);
        assert_eq!(code(&curvident(&args)), 0);
        let o = curvident(&[
            "export",
            "--model-file",
            first.to_str().unwrap(),
            "--out",
            second.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        assert_eq!(read(&first), read(&second));
        let v: Value = serde_json::from_str(&read(&first)).unwrap();
        assert_eq!(v["model"]["kind"], "explicit");
    }

    // a catalog spec written by export reloads to the same report
    let b = dir.path().join("again.json");
    let o = curvident(&[
        "export",
        "--model-file",
        a.to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(read(&a), read(&b));
}

#[test]
fn export_exit_code_follows_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let o = curvident(&[
        "export",
        "--model",
        "example6d",
        "--k",
        "1",
        "--set",
        "eq42",
        "--expect-fail",
        "eq42",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&read(&p)).unwrap();
    assert_eq!(v["verdict"], "fail");
}

#[test]
fn thread_count_never_changes_output() {
    let runs = [
        vec![
            "verify",
            "--model",
            "random-einstein",
            "--dim",
            "6",
            "--seed",
            "2",
            "--terms",
            "2",
            "--json",
        ],
        vec![
            "random-check",
            "--dim",
            "5",
            "--identity",
            "weyl-patterson",
            "-n",
            "6",
            "--seed",
            "11",
            "--json",
        ],
        vec!["invariants", "--model", "sl3so3", "--json"],
    ];
    for args in runs {
        let base = curvident(&[&["--threads", "1"], args.as_slice()].concat());
        assert_eq!(code(&base), 0);
        for t in ["2", "4"] {
            let o = curvident(&[&["--threads", t], args.as_slice()].concat());
            assert_eq!(o.stdout, base.stdout, "{args:?} threads {t}");
        }
        let env = Command::new(env!("CARGO_BIN_EXE_curvident"))
            .args(&args)
            .env("CURVIDENT_THREADS", "3")
            .output()
            .unwrap();
        assert_eq!(env.stdout, base.stdout);
    }
}
