use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nilkaehler::catalog::{AlgebraJson, Catalog, FormJson};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn nilkaehler(args: &[&str]) -> Output {
    nilkaehler_with(args, None)
}

fn nilkaehler_with(args: &[&str], catalog: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nilkaehler"));
    cmd.args(args).env_remove("NILKAEHLER_CATALOG");
    if let Some(dir) = catalog {
        cmd.env("NILKAEHLER_CATALOG", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn list_names_every_entry() {
    let o = nilkaehler(&["list"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 13);
    assert!(out.contains("g21\t(2,4,6)"));
    assert!(out.contains("g25\t(4,6)"));
}

#[test]
fn show_prints_brackets_and_j() {
    let o = nilkaehler(&["show", "g21"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("[e1,e4] = e6"));
    assert!(out.contains("J(e2) = psi12*e1 - psi11*e2"));
    assert!(out.contains("form w1: e^1^e^6 + e^2^e^4 - e^3^e^4 - e^3^e^5 (admits no compatible J)"));
}

#[test]
fn unknown_entry_is_usage_error() {
    let o = nilkaehler(&["show", "g00"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown entry"));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(code(&nilkaehler(&["frobnicate"])), 2);
    assert_eq!(code(&nilkaehler(&["export", "g21", "--format", "pdf"])), 2);
    assert_eq!(code(&nilkaehler(&["verify", "g21", "--form", "w9"])), 2);
    assert_eq!(code(&nilkaehler(&["verify", "--form", "w1"])), 2);
}

#[test]
fn curvature_at_a_binding() {
    let o = nilkaehler(&["curvature", "g24", "--form", "w1", "--bind", "psi11=1", "psi12=1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "R_{1,2,1,2} = 1"), "{out}");
    assert!(out.contains("side conditions: psi11 != 0, psi12 != 0"));
    assert!(out.contains("Ricci = 0"));
}

#[test]
fn curvature_stays_symbolic_without_binding() {
    let o = nilkaehler(&["curvature", "g21", "--form", "w2"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "R_{1,2,1,2} = -psi12"));
    assert!(out.contains("side conditions: psi12 != 0"));
}

#[test]
fn curvature_json_report() {
    let o = nilkaehler(&["curvature", "g21", "--form", "w2", "--bind", "psi12=-2/3", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["binding"]["psi12"], "-2/3");
    let down = v["down_components"].as_array().unwrap();
    assert!(down.iter().any(|c| c["idx"] == serde_json::json!([1, 2, 1, 2]) && c["value"] == "2/3"));
}

#[test]
fn bindings_are_exact_and_admissible() {
    let float = nilkaehler(&["curvature", "g21", "--form", "w2", "--bind", "psi12=0.5"]);
    assert_eq!(code(&float), 2);
    let excluded = nilkaehler(&["curvature", "g21", "--form", "w2", "--bind", "psi12=0"]);
    assert_eq!(code(&excluded), 2);
    assert!(String::from_utf8_lossy(&excluded.stderr).contains("psi12"));
    let unknown = nilkaehler(&["curvature", "g21", "--form", "w2", "--bind", "mu=1"]);
    assert_eq!(code(&unknown), 2);
    let negative = nilkaehler(&["curvature", "g21", "--form", "w1"]);
    assert_eq!(code(&negative), 2);
}

#[test]
fn verify_cites_the_matched_component() {
    let o = nilkaehler(&["verify", "g21"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("PASS g21 w2/J: R_ [1, 2, 1, 2] = -psi12"));
    assert!(out.ends_with("verification passed\n"));
}

#[test]
fn verify_restricted_to_a_form() {
    let o = nilkaehler(&["verify", "g16", "--form", "w1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("w1/J0_w1: not compatible"));
    assert!(!out.contains(" w2"));
}

fn outcome_set(lines: &str) -> BTreeSet<String> {
    lines
        .lines()
        .filter(|l| l.starts_with("PASS ") || l.starts_with("FAIL "))
        .map(|l| l.split("  (").next().unwrap().to_string())
        .collect()
}

#[test]
fn verify_all_agrees_with_self_validation() {
    let o = nilkaehler(&["verify"]);
    assert_eq!(code(&o), 0);
    let report = Catalog::embedded().unwrap().self_validate();
    let expected: BTreeSet<String> = report
        .entries
        .iter()
        .flat_map(|e| {
            e.checks
                .iter()
                .map(move |c| format!("{} {} {}", if c.pass { "PASS" } else { "FAIL" }, e.name, c.name))
        })
        .collect();
    assert_eq!(outcome_set(&stdout(&o)), expected);
}

/// A copy of the shipped data with the g21 curvature sign flipped.
fn broken_catalog() -> PathBuf {
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data");
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("broken_catalog");
    std::fs::create_dir_all(&dir).unwrap();
    for item in std::fs::read_dir(&src).unwrap() {
        let path = item.unwrap().path();
        std::fs::copy(&path, dir.join(path.file_name().unwrap())).unwrap();
    }
    let exp = dir.join("expectations.json");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&exp).unwrap()).unwrap();
    for x in v.as_array_mut().unwrap() {
        if x["entry"] == "g21" {
            for c in x["down_components"].as_array_mut().unwrap() {
                if c["idx"] == serde_json::json!([1, 2, 1, 2]) {
                    c["value"] = "psi12".into();
                }
            }
        }
    }
    std::fs::write(&exp, serde_json::to_string(&v).unwrap()).unwrap();
    dir
}

#[test]
fn catalog_override_and_failure_exit_code() {
    let dir = broken_catalog();
    let o = nilkaehler_with(&["verify", "g21"], Some(&dir));
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("FAIL g21 w2/J: R_ [1, 2, 1, 2] = psi12"));
    assert!(out.contains("verification FAILED"));
    assert_eq!(code(&nilkaehler_with(&["verify", "g24"], Some(&dir))), 0);
    let missing = nilkaehler_with(&["list"], Some(Path::new("/nonexistent/catalog")));
    assert_eq!(code(&missing), 2);
}

#[test]
fn latex_metric_layout() {
    let o = nilkaehler(&["export", "g21", "--form", "w2", "--format", "latex"]);
    assert_eq!(code(&o), 0);
    let squash = |s: &str| s.split_whitespace().collect::<String>();
    let expected = r"g = \begin{pmatrix}
        0 & 0 & 0 & 0 & \frac{\psi_{11}^2+1}{\psi_{12}} & -\psi_{11} \\
        0 & 0 & 0 & 0 & \psi_{11} & -\psi_{12} \\
        0 & 0 & -\frac{\psi_{11}^2+1}{\psi_{12}} & \psi_{11} & 0 & 0 \\
        0 & 0 & \psi_{11} & -\psi_{12} & 0 & 0 \\
        \frac{\psi_{11}^2+1}{\psi_{12}} & \psi_{11} & 0 & 0 & 0 & 0 \\
        -\psi_{11} & -\psi_{12} & 0 & 0 & 0 & 0
    \end{pmatrix}";
    assert!(squash(&stdout(&o)).contains(&squash(expected)), "{}", stdout(&o));
    assert!(stdout(&o).contains(r"R_{1,2,1,2} = -\psi_{12}"));
}

#[test]
fn json_export_uses_the_schemas() {
    let o = nilkaehler(&["export", "g24", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let alg: AlgebraJson = serde_json::from_value(v["algebra"].clone()).unwrap();
    let form: FormJson = serde_json::from_value(v["forms"][0]["form"].clone()).unwrap();
    let cat = Catalog::embedded().unwrap();
    let entry = cat.get("g24").unwrap();
    assert_eq!(alg.build().unwrap(), entry.algebra);
    assert_eq!(form.build().unwrap(), entry.forms[0].form);
    assert_eq!(v["structures"][0]["metric"].as_array().unwrap().len(), 6);
}

#[test]
fn csv_export() {
    let o = nilkaehler(&["export", "g17", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("entry,form,structure,kind,index,value"));
    assert!(lines.all(|l| l.split(',').count() == 6));
    assert!(out.lines().any(|l| l.ends_with(",down,1 2 1 2,-psi12")), "{out}");
}

#[test]
fn solve_linear_on_standard_form() {
    let o = nilkaehler(&["solve-linear", data("standard6.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dimension"], 21);
    assert_eq!(v["basis"].as_array().unwrap().len(), 21);
}

#[test]
fn search_is_seeded() {
    let args = [
        "search".to_string(),
        data("abelian6.json").to_str().unwrap().to_string(),
        data("standard6.json").to_str().unwrap().to_string(),
        "--starts".into(),
        "5".into(),
        "--seed".into(),
        "3".into(),
    ];
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let a = nilkaehler(&args);
    let b = nilkaehler(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["status"], "converged");
    assert!(v["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn search_finds_nothing_on_a_negative_form() {
    let o = nilkaehler(&[
        "search",
        data("g21_algebra.json").to_str().unwrap(),
        data("g21_w1.json").to_str().unwrap(),
        "--starts",
        "20",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "failed");
    assert_eq!(v["starts_tried"], 20);
}

#[test]
fn search_validates_flags_and_files() {
    let alg = data("abelian6.json");
    let form = data("standard6.json");
    let (alg, form) = (alg.to_str().unwrap(), form.to_str().unwrap());
    assert_eq!(code(&nilkaehler(&["search", alg, form, "--tol", "-1"])), 2);
    assert_eq!(code(&nilkaehler(&["search", alg, form, "--starts", "0"])), 2);
    assert_eq!(code(&nilkaehler(&["search", alg, "/nonexistent.json"])), 2);
    assert_eq!(code(&nilkaehler(&["solve-linear", alg])), 2);
}
