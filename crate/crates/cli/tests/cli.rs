use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_patchlab"));
    c.env_remove("PATCHLAB_MAX_BASIS");
    c
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn patchlab(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn patchlab")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("report is JSON")
}

fn shipped() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(fixtures())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn numerology_from_flags() {
    let o = patchlab(&["numerology", "--n", "2", "--r1", "0", "--r2", "1"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let res = &r["steps"][0]["result"];
    assert_eq!(res["l0"], 1);
    assert_eq!(res["q0"], 1);
    assert_eq!(res["infinity_identity"]["equal"], true);
}

#[test]
fn numerology_optional_counts() {
    let o = patchlab(&["numerology", "--n", "3", "--r1", "1", "--r2", "0", "--q", "4", "--T", "2", "--SpR", "3"]);
    assert_eq!(code(&o), 0);
    let res = &json(&o)["steps"][0]["result"];
    assert!(res.get("framing_variables").is_some());
    assert!(res.get("generator_count").is_some());
    assert!(res.get("rloc_dimension").is_some());
}

#[test]
fn numerology_needs_its_flags() {
    let o = patchlab(&["numerology", "--n", "2"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("E_MISSING_DECLARATION"));
}

#[test]
fn selfcheck_passes() {
    let o = patchlab(&["selfcheck"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = json(&o);
    assert_eq!(r["summary"]["all_pass"], true);
    assert!(r["summary"]["steps"].as_u64().unwrap() >= 16);
}

#[test]
fn fixture_exit_codes() {
    for name in shipped() {
        let want = match name.as_str() {
            "pair_corrupted_link.json" | "tampered_psi.json" => 2,
            _ => 0,
        };
        let o = patchlab(&["run", "--input", &fixture(&name)]);
        assert_eq!(code(&o), want, "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn invalid_fixtures_are_errors() {
    for (name, want) in [
        ("bad_version.json", "E_SCHEMA"),
        ("unknown_field.json", "E_SCHEMA"),
        ("dd_nonzero.json", "E_INVARIANT"),
        ("missing_level.json", "E_INVARIANT"),
    ] {
        let o = patchlab(&["run", "--input", &fixture(&format!("invalid/{name}"))]);
        assert_eq!(code(&o), 1, "{name}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(want), "{name}: {err}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn corrupted_link_cites_level() {
    let o = patchlab(&["patch-pair", "--input", &fixture("pair_corrupted_link.json")]);
    assert_eq!(code(&o), 2);
    let failure = &json(&o)["steps"][0]["result"]["failure"];
    assert_eq!(failure["level"], 2);
    assert_eq!(failure["code"], "E_LINK_SQUARE");
}

#[test]
fn tampered_psi_fails_verification() {
    let o = patchlab(&["patch", "--input", &fixture("tampered_psi.json")]);
    assert_eq!(code(&o), 2);
    let step = &json(&o)["steps"][0];
    assert_eq!(step["status"], "fail");
}

#[test]
fn subcommands_select_steps() {
    let cases = [
        ("homology", "complexes.json", "homology"),
        ("minimize", "complexes.json", "minimize"),
        ("localize", "operators.json", "localize"),
        ("resolve", "graded.json", "resolve"),
        ("invariants", "matrices.json", "invariants"),
        ("check-deduce", "graded.json", "check-deduce"),
        ("check-bound", "graded.json", "check-bound"),
        ("patch", "free_towers.json", "patch"),
        ("patch-pair", "pair_identity.json", "patch-pair"),
        ("numerology", "numerology.json", "numerology"),
    ];
    for (cmd, file, op) in cases {
        let o = patchlab(&[cmd, "--input", &fixture(file)]);
        assert_eq!(code(&o), 0, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let r = json(&o);
        assert_eq!(r["command"], cmd);
        let steps = r["steps"].as_array().unwrap();
        assert!(steps.iter().any(|s| s["op"] == op), "{cmd} ran no {op} step");
    }
}

#[test]
fn bare_tower_runs_without_pipeline() {
    let o = patchlab(&["patch", "--input", &fixture("augmentation_tower.json")]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["steps"].as_array().unwrap().len(), 1);
    assert_eq!(r["steps"][0]["result"]["conclusions"]["depth_target"], 1);
}

#[test]
fn levels_flag_overrides_tower() {
    let o = patchlab(&["patch", "--input", &fixture("free_tower.json"), "--levels", "2"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let truncs = r["steps"][0]["result"]["patched"]["truncations"].as_array().unwrap();
    assert_eq!(truncs.len(), 2);
}

#[test]
fn basis_cap_from_environment() {
    let o = bin().args(["run", "--input", &fixture("free_tower.json")]).env("PATCHLAB_MAX_BASIS", "8").output().unwrap();
    assert_eq!(code(&o), 1);
    let r = json(&o);
    assert_eq!(r["steps"][0]["status"], "error");
    assert_eq!(r["steps"][0]["error"]["code"], "E_BASIS_CAP");
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("patchlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.json");
    let input = fixture("matrices.json");
    let a = patchlab(&["invariants", "--input", &input]);
    let b = patchlab(&["invariants", "--input", &input, "--output", out.to_str().unwrap()]);
    assert_eq!(code(&b), 0);
    assert!(b.stdout.is_empty());
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn table_format() {
    let o = patchlab(&["numerology", "--n", "2", "--r1", "0", "--r2", "1", "--format", "table"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("numerology"));
    assert!(text.contains("l0"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&patchlab(&["run", "--bogus"])), 1);
    assert_eq!(code(&patchlab(&["frobnicate"])), 1);
    assert_eq!(code(&patchlab(&["run"])), 1);
    assert_eq!(code(&patchlab(&["run", "--input", "/nonexistent/scenario.json"])), 1);
    assert_eq!(code(&patchlab(&["--help"])), 0);
}

#[test]
fn reports_are_byte_identical() {
    for name in shipped() {
        let input = fixture(&name);
        let first = patchlab(&["run", "--input", &input]);
        let second = patchlab(&["run", "--input", &input]);
        let parallel = patchlab(&["run", "--input", &input, "--parallel"]);
        assert!(!first.stdout.is_empty(), "{name}");
        assert_eq!(first.stdout, second.stdout, "{name}: two runs differ");
        assert_eq!(first.stdout, parallel.stdout, "{name}: --parallel changes the report");
        assert_eq!(first.status, parallel.status);
    }
}
