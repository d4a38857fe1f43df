//! Exit-code contract of the command-line interface: 0 pass, 1 equation
//! failure, 2 invalid input or missing structure.

use std::process::Command;

fn profcheck(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_profcheck"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn check_zmod2_traced_passes() {
    let (code, stdout, _) = profcheck(&["check", "builtin:Zmod(2)", "--presentation", "T"]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("RESULT: pass"));
}

#[test]
fn check_bool_chain_traced_is_missing_structure() {
    let (code, _, stderr) = profcheck(&["check", "builtin:bool_chain", "--presentation", "T"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("trace"), "stderr: {stderr}");
}

#[test]
fn corrupted_model_file_exits_2() {
    let dir = std::env::temp_dir().join("profcheck-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let (code, _, stderr) = profcheck(&["check", path.to_str().unwrap(), "--presentation", "T"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("invalid model JSON"));
}

#[test]
fn failing_equations_exit_1() {
    // bool_chain is not autonomous: the A presentation's reassociation cells
    // cannot invert
    let (code, stdout, _) = profcheck(&["check", "builtin:bool_chain", "--presentation", "A"]);
    assert_eq!(code, 1, "stdout: {stdout}");
    assert!(stdout.contains("RESULT: fail"));
}

#[test]
fn derive_traces_counts() {
    let (code, stdout, _) = profcheck(&["derive", "builtin:Zmod(3)", "--what", "traces", "--format", "json"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"count\": 1"), "stdout: {stdout}");
}

#[test]
fn derive_lindist_reports_lukasiewicz_witness() {
    let (code, stdout, _) = profcheck(&["derive", "builtin:lukasiewicz3", "--what", "lindist", "--format", "json"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"right_invertible\": false"));
    assert!(stdout.contains("δ_R"));
}

#[test]
fn derive_karoubi_counts_idempotents() {
    // a JSON model over the {1,e} monoid category
    let dir = std::env::temp_dir().join("profcheck-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("monoid1e.json");
    let spec = serde_json::json!({
        "category": {
            "name": "M1e",
            "objects": ["*"],
            "morphisms": [
                {"id": "1", "src": "*", "tgt": "*"},
                {"id": "e", "src": "*", "tgt": "*"}
            ],
            "identities": {"*": "1"},
            "composition": [["1","1","1"],["1","e","e"],["e","1","e"],["e","e","e"]]
        },
        "tensor_obj": [["*"]],
        "tensor_mor": [["1","e"],["e","e"]],
        "unit": "*",
        "associator": [[["1"]]],
        "lunitor": ["1"],
        "runitor": ["1"]
    });
    std::fs::write(&path, serde_json::to_string(&spec).unwrap()).unwrap();
    let (code, stdout, stderr) = profcheck(&[
        "derive",
        path.to_str().unwrap(),
        "--what",
        "karoubi",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(stdout.contains("\"objects\": 2"), "stdout: {stdout}");
    assert!(stdout.contains("\"cauchy_complete\": true"));
}

#[test]
fn derive_prop4_on_zmod2() {
    let (code, stdout, _) = profcheck(&["derive", "builtin:Zmod(2)", "--what", "prop4", "--format", "json"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"conditions_hold\": true"));
    assert!(stdout.contains("\"distributors_invert\": true"));
}

#[test]
fn list_names_every_definition() {
    let (code, stdout, _) = profcheck(&["list"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("T ") && stdout.contains("Def 8"));
    assert!(stdout.contains("F_star") && stdout.contains("Def 12"));
    let count = stdout.lines().filter(|l| l.contains("Def") || l.contains("Example 1")).count();
    assert!(count >= 13, "catalog lists {count} presentations");
}
