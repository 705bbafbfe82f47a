use std::process::{Command, Output};

fn dqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqc"))
        .args(args)
        .output()
        .expect("spawn dqc")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn estimate_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "[architecture]\nkind = \"type3\"\nd = 3\ntype3_mode = \"transversal_cnot\"\n\n[probabilities]\np_link = 0.5\n",
    )
    .unwrap();
    let out = dqc(&["estimate", "--config", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("expected_attempts: 18\n"), "{text}");
}

#[test]
fn missing_parameter_names_the_field_and_exits_2() {
    let out = dqc(&["estimate", "--set", "kind=\"type2\"", "--set", "p_link=0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains('d'), "{}", stderr(&out));
}

#[test]
fn unknown_key_is_rejected() {
    let out = dqc(&["estimate", "--set", "architecture.distance=3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("distance"), "{}", stderr(&out));
}

#[test]
fn out_of_range_probability_is_rejected() {
    let out = dqc(&[
        "estimate",
        "--set",
        "kind=\"type2\"",
        "--set",
        "d=3",
        "--set",
        "p_link=1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("p_link"), "{}", stderr(&out));
}

#[test]
fn sweep_writes_file_and_refuses_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig6.csv");
    let path = path.to_str().unwrap();
    assert!(dqc(&["sweep", "--recipe", "fig6", "--out", path])
        .status
        .success());
    let body = std::fs::read_to_string(path).unwrap();
    assert!(body.starts_with("kind,protocol,d,p,p_link,"));
    assert_eq!(body.lines().count(), 1 + 12 * 5);
    let again = dqc(&["sweep", "--recipe", "fig6", "--out", path]);
    assert_eq!(again.status.code(), Some(2));
    assert!(
        dqc(&["sweep", "--recipe", "fig6", "--out", path, "--force"])
            .status
            .success()
    );
}

#[test]
fn validate_passes_with_small_budget() {
    let out = dqc(&["validate", "--trials", "20000", "--seed", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(text.ends_with("82 checks, 0 failed\n"), "{text}");
}
