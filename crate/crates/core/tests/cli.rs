use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(id: &str) -> String {
    format!("{}/../../fixtures/{id}.json", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fano-lines")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fano-lines-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn passing_suite_exits_zero_and_writes_json() {
    let out = tmp("divisors.json");
    let o = run(&["divisors", &fixture("FX-C2"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("5 pass, 0 fail"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema"], "fano-lines-report/1");
    assert_eq!(v["suite"], "divisors");
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(v["checks"][0].get("runtime_ms").is_none());
}

#[test]
fn failing_check_exits_one() {
    let o = run(&["report", &fixture("FX-N1"), "--suite", "local", "--samples", "10", "--out", "-"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL     local.jacobian-sigma"));
    let json_start = text.find('{').unwrap();
    let v: serde_json::Value = serde_json::from_str(&text[json_start..]).unwrap();
    assert_eq!(v["summary"]["fail"], 1);
}

#[test]
fn input_errors_exit_two_and_name_the_field() {
    let bad = tmp("bad.json");
    std::fs::write(&bad, r#"{"id":"X","kind":"nodal","q":"x0*x1","k":"x0^3","points":[],"surprise":1}"#).unwrap();
    let o = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: "), "{}", stderr(&o));

    let wrong_kind = tmp("kind.json");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(fixture("FX-N1")).unwrap()).unwrap();
    v["kind"] = "tacnodal".into();
    std::fs::write(&wrong_kind, v.to_string()).unwrap();
    let o = run(&["validate", wrong_kind.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind"), "{}", stderr(&o));

    let o = run(&["validate", "/nonexistent/fx.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["report", &fixture("FX-N1"), "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["local-eqs", &fixture("FX-N1"), "--point", "99"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--point"));
    let o = run(&[
        "phi",
        &fixture("FX-N1"),
        "--scheme",
        r#"{"variant":"reduced","points":[["1","0","0","0","0","0"],["0","1","0","0","0","0"]]}"#,
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--scheme"));
}

#[test]
fn reports_are_deterministic() {
    let args = |out: &str| {
        vec![
            "roundtrip".to_string(),
            fixture("FX-C1"),
            "--samples".into(),
            "12".into(),
            "--seed".into(),
            "5".into(),
            "--out".into(),
            out.to_string(),
        ]
    };
    let (a, b) = (tmp("a.json"), tmp("b.json"));
    for p in [&a, &b] {
        let argv = args(p.to_str().unwrap());
        let o = run(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let o = run(&["validate", &fixture("FX-N1"), "--timings", "--out", "-"]);
    assert!(stdout(&o).contains("runtime_ms"));
}

#[test]
fn regenerated_corpus_matches_committed_fixtures() {
    let dir = format!("{}/../../fixtures", env!("CARGO_MANIFEST_DIR"));
    let o = run(&["regen-fixtures", "--check", &dir]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("identical").count(), 4);
}

#[test]
fn phi_and_inverse_commands() {
    let o = run(&["phi", &fixture("FX-N1"), "--samples", "8", "--out", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: serde_json::Value = serde_json::from_str(&text[text.find('[').unwrap()..]).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 8);
    let line = rows[0]["phi"]["line"].to_string();
    let o = run(&["phi-inv", &fixture("FX-N1"), "--line", &line, "--out", "-"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let back: serde_json::Value = serde_json::from_str(&text[text.find('[').unwrap()..]).unwrap();
    assert_eq!(back[0]["phi_inverse"]["outcome"], "scheme");
}

#[test]
fn local_commands() {
    let o = run(&["sing-type", &fixture("FX-C2")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0:A2"));
    assert!(!stdout(&o).contains("A1"));
    let o = run(&["local-eqs", &fixture("FX-C1"), "--point", "1", "--out", "-"]);
    assert_eq!(o.status.code(), Some(0));
    for name in ["psi30", "psi03", "psi21", "psi12", "blowup_chart"] {
        assert!(stdout(&o).contains(name), "{name}");
    }
}

#[test]
fn equivariance_skips_on_nodal_and_runs_on_cuspidal() {
    let o = run(&["equivariance", &fixture("FX-N2"), "--samples", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 pass, 0 fail, 0 expected, 4 skipped"), "{}", stdout(&o));
    let o = run(&["equivariance", &fixture("FX-C2"), "--samples", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("4 pass"));
}
