use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decomp-lab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn building_text_reports() {
    let o = run(&["--format", "text", "building", "sp", "--p", "2", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3 elements, H̃_0 = Z^2");

    let o = run(&["--format", "text", "building", "gl", "--p", "2", "--k", "3", "--homology"]);
    assert!(stdout(&o).starts_with("14 elements, H̃_1 = Z^8"));

    let o = run(&["--format", "text", "building", "gl", "--p", "2", "--k", "1"]);
    assert_eq!(stdout(&o).trim(), "empty");
}

#[test]
fn building_json_fields() {
    let o = run(&["building", "sp", "--p", "3", "--k", "1", "--homology"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "decomp-lab/1");
    assert_eq!(v["kind"], "sp");
    assert_eq!(v["elements"], 4);
    assert_eq!(v["expected_rank_formula_matched"], true);
    let h0 = v["homology"].as_array().unwrap().iter().find(|g| g["degree"] == 0).unwrap();
    assert_eq!(h0["betti"], 3);
    assert_eq!(h0["torsion"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_reports_pass_with_schema() {
    let o = run(&["verify", "theorem-1-1", "--p", "3", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "decomp-lab/1");
    assert_eq!(v["passed"], true);
    assert_eq!(v["details"]["theorem"], "1.1");
    assert_eq!(v["details"]["fixed_decompositions"], 4);
    assert_eq!(v["details"]["gf_identity"], true);
    assert_eq!(v["details"]["poset_isomorphic_to_tits_sp"], true);

    let o = run(&["--format", "text", "verify", "example-2-3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS example-2-3"));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["verify", "character", "--p", "3", "--k", "1", "--seed", "5"]);
    let b = run(&["verify", "character", "--p", "3", "--k", "1", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["suite", "--max-k", "1", "--max-p", "3"]);
    let b = run(&["suite", "--max-k", "1", "--max-p", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["failed"], 0);
    for r in v["results"].as_array().unwrap() {
        assert!(r["k"].is_null() || r["k"] == 1);
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "no-such-target"]).status.code(), Some(2));
    assert_eq!(run(&["building", "gl", "--p", "4", "--k", "2"]).status.code(), Some(2));
    assert_eq!(run(&["building", "gl", "--p", "2", "--k", "0"]).status.code(), Some(2));
}

#[test]
fn guard_violations_exit_2() {
    let o = run(&["building", "gl", "--p", "2", "--k", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("DECOMP_LAB_MAX_CELLS"));
    assert_eq!(run(&["verify", "partition-fixed", "--p", "3", "--k", "2"]).status.code(), Some(2));
}

#[test]
fn report_written_to_file() {
    let dir = std::env::temp_dir().join(format!("decomp-lab-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let o = run(&["verify", "join-cor-1-3", "--p", "2", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["details"]["join"]["rank"], 2);
    std::fs::remove_dir_all(&dir).unwrap();
}
