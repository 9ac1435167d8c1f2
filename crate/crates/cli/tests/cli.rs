use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dlparam(args: &[&str]) -> Output {
    dlparam_env(args, &[])
}

fn dlparam_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dlparam"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("run dlparam")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json stdout")
}

fn write_sheet(dir: &Path, name: &str, sheet: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(sheet).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn builtin(q: &str) -> Value {
    let out = dlparam(&["table", "--q", q]);
    assert_eq!(code(&out), 0);
    json(&out)
}

fn row_index(sheet: &Value, label: &str) -> usize {
    sheet["irreducibles"]
        .as_array()
        .unwrap()
        .iter()
        .position(|r| r["label"] == label)
        .unwrap()
}

#[test]
fn check_q_reports_ratios_and_gate() {
    let out = dlparam(&["check-q", "--n", "2", "--q", "11", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["threshold"], "1/8");
    assert_eq!(v["tori"][0]["ratio"], "1/10");
    assert_eq!(v["tori"][1]["ratio"], "1/12");
    assert_eq!(v["holds"], true);

    assert_eq!(code(&dlparam(&["check-q", "--n", "2", "--q", "7"])), 2);

    let v = json(&dlparam(&["check-q", "--n", "1", "--q", "3", "--json"]));
    assert_eq!(v["tori"][0]["ratio"], "0");
    assert_eq!(v["holds"], true);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&dlparam(&["check-q", "--n", "2", "--q", "6"])), 1);
    assert_eq!(code(&dlparam(&["check-q", "--n", "0", "--q", "5"])), 1);
    assert_eq!(code(&dlparam(&["frobnicate"])), 1);
    assert_eq!(
        code(&dlparam(&["recover", "--q", "11", "--rho", "onedim"])),
        1
    );
    assert_eq!(
        code(&dlparam(&[
            "recover",
            "--q",
            "11",
            "--rho",
            "principal:3,3"
        ])),
        1
    );
    assert_eq!(code(&dlparam(&["recover"])), 1);
    assert_eq!(
        code(&dlparam(&[
            "gram", "--q", "11", "--torus", "2", "--chars", "0;x"
        ])),
        1
    );
    assert_eq!(
        code(&dlparam_env(
            &["check-q", "--n", "2", "--q", "11"],
            &[("DLPARAM_THREADS", "0")]
        )),
        1
    );
    assert_eq!(code(&dlparam(&["--help"])), 0);
}

#[test]
fn recover_steinberg_is_unipotent() {
    let out = dlparam(&["recover", "--q", "11", "--rho", "steinberg:0", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["label"], "steinberg:0");
    assert_eq!(v["unipotent"], true);
    assert_eq!(v["epsilon"]["residues"], serde_json::json!([0, 0]));
    assert_eq!(v["tori"][1]["terms"][0]["coefficient"], -1);
}

#[test]
fn recover_canonicalizes_labels() {
    let a = dlparam(&["recover", "--q", "11", "--rho", "principal:1,0", "--json"]);
    let b = dlparam(&[
        "recover",
        "--q",
        "11",
        "--rho",
        "principal:0,1",
        "--json",
        "--fast",
    ]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["epsilon"]["residues"], serde_json::json!([0, 12]));
}

#[test]
fn recover_refuses_small_q() {
    let out = dlparam(&["recover", "--q", "7", "--rho", "onedim:0"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    assert_eq!(code(&dlparam(&["unipotent", "--q", "5"])), 2);
}

#[test]
fn unipotent_lists_two_rows() {
    let out = dlparam(&["unipotent", "--q", "11", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        json(&out)["unipotent"],
        serde_json::json!(["onedim:0", "steinberg:0"])
    );
}

#[test]
fn classes_count() {
    let v = json(&dlparam(&["classes", "--n", "2", "--q", "11", "--json"]));
    assert_eq!(v["count"], 110);
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 110);
    let pairs: u64 = classes.iter().map(|c| c["pairs"].as_u64().unwrap()).sum();
    assert_eq!(pairs, 100 + 120);
    let text = dlparam(&["classes", "--n", "3", "--q", "2"]);
    assert!(String::from_utf8(text.stdout)
        .unwrap()
        .starts_with("GL3(F2): 4 geometric"));
}

#[test]
fn gram_determinants() {
    let v = json(&dlparam(&[
        "gram", "--q", "11", "--torus", "1+1", "--chars", "0,0;0,1", "--json",
    ]));
    assert_eq!(v["nonzero"], true);
    assert_eq!(v["det"], serde_json::json!([["8100", "1", 0]]));
    // a repeated character is rejected
    assert_eq!(
        code(&dlparam(&[
            "gram", "--q", "11", "--torus", "2", "--chars", "3;3"
        ])),
        1
    );
}

#[test]
fn output_is_byte_identical() {
    let args = ["recover", "--q", "11", "--json"];
    let one = dlparam_env(&args, &[("DLPARAM_THREADS", "1")]);
    let many = dlparam_env(&args, &[("DLPARAM_THREADS", "4")]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(json(&one).as_array().unwrap().len(), 120);
    assert_eq!(
        dlparam(&["classes", "--n", "2", "--q", "13"]).stdout,
        dlparam(&["classes", "--n", "2", "--q", "13"]).stdout
    );
}

#[test]
fn table_round_trips_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gl2_11.json");
    let p = path.to_str().unwrap();
    assert_eq!(code(&dlparam(&["table", "--q", "11", "--out", p])), 0);
    assert_eq!(
        std::fs::read(&path).unwrap(),
        dlparam(&["table", "--q", "11"]).stdout
    );
    assert_eq!(code(&dlparam(&["validate", "--sheet", p])), 0);

    let out = dlparam(&["recover", "--sheet", p, "--rho", "cuspidal:1", "--json"]);
    let direct = dlparam(&["recover", "--q", "11", "--rho", "cuspidal:1", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(out.stdout, direct.stdout);
}

#[test]
fn bad_sheets_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut sheet = builtin("11");
    let i = row_index(&sheet, "steinberg:3");
    sheet["irreducibles"][i]["dim"] = 12.into();
    let p = write_sheet(dir.path(), "dims.json", &sheet);

    let out = dlparam(&["validate", "--sheet", &p, "--json"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["violations"][0]["kind"], "dim_squares");
    assert_eq!(
        code(&dlparam(&["recover", "--sheet", &p, "--rho", "onedim:0"])),
        3
    );

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"group\": 1}").unwrap();
    assert_eq!(
        code(&dlparam(&[
            "unipotent",
            "--sheet",
            garbage.to_str().unwrap()
        ])),
        3
    );
    assert_eq!(
        code(&dlparam(&[
            "validate",
            "--sheet",
            "/nonexistent/sheet.json"
        ])),
        3
    );
}

#[test]
fn inconsistent_sheet_exits_four() {
    // swapping the elliptic values of two rows keeps every row a class
    // function but splits onedim:0 across two geometric classes
    let dir = tempfile::tempdir().unwrap();
    let mut sheet = builtin("11");
    let a = row_index(&sheet, "onedim:0");
    let b = row_index(&sheet, "cuspidal:1");
    let va = sheet["irreducibles"][a]["values"]["2"].take();
    let vb = sheet["irreducibles"][b]["values"]["2"].take();
    sheet["irreducibles"][a]["values"]["2"] = vb;
    sheet["irreducibles"][b]["values"]["2"] = va;
    let p = write_sheet(dir.path(), "swapped.json", &sheet);

    assert_eq!(code(&dlparam(&["validate", "--sheet", &p])), 0);
    let out = dlparam(&["recover", "--sheet", &p, "--rho", "onedim:0"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8(out.stderr).unwrap().contains("onedim:0"));
    assert_eq!(
        code(&dlparam(&["recover", "--sheet", &p, "--rho", "onedim:1"])),
        0
    );
}
