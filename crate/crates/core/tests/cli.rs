use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ctxhier"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn classify_bell() {
    let (code, out, _) = run(&["classify", "bell"]);
    assert_eq!(code, 0);
    assert!(out.contains("tier: probabilistic"));
    assert!(out.contains("dutch-bookable: yes"));
    assert!(out.contains("classical extension: no"));

    let (code, out, _) = run(&["classify", "--model", "ghz", "--format", "structured"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["tier"], "strong");
    assert_eq!(
        v["contextuality"],
        json!({"strong": true, "logical": true, "probabilistic": true})
    );
}

#[test]
fn catalog_list_names_every_model() {
    let (code, out, _) = run(&["catalog-list"]);
    assert_eq!(code, 0);
    for name in ["bell", "hardy", "pr-box", "specker", "ghz"] {
        assert!(out.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn signaling_file_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let model = ctxhier_core::workbench::io::model_to_json(
        &ctxhier_core::workbench::catalog::bell().unwrap(),
    );
    let mut v: Value = serde_json::from_str(&model).unwrap();
    v["tables"][0]["weights"] = json!([{"section": {"a": "0", "b": "0"}, "p": "1"}]);
    let path = write(dir.path(), "signal.json", &v.to_string());
    let (code, _, err) = run(&["classify", &path]);
    assert_eq!(code, 2);
    assert!(err.contains("compatibility"), "{err}");

    v["tables"][0]["weights"] = json!([{"section": {"a": "0", "b": "0"}, "p": "-1"}]);
    let path = write(dir.path(), "negative.json", &v.to_string());
    let (code, _, err) = run(&["classify", &path]);
    assert_eq!(code, 2);
    assert!(err.contains("tables[0]"), "{err}");

    let (code, _, err) = run(&["classify", "nonexistent-model"]);
    assert_eq!(code, 2);
    assert!(err.contains("catalog"));
}

#[test]
fn strong_witness_for_pr_box() {
    let (code, out, _) = run(&["witness", "pr-box", "--tier", "strong"]);
    assert_eq!(code, 0);
    assert!(out.contains("defect: 1"));
    assert!(out.contains("collection (8 events)"));

    let (code, _, err) = run(&["witness", "bell", "--tier", "strong"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn cap_exits_with_three() {
    let (code, _, err) = run(&["--cap", "10", "classify", "ghz"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn structured_outputs_verify() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["dutchbook", "bell"],
        vec!["dutchbook", "pr-box"],
        vec!["witness", "hardy"],
        vec!["witness", "bell"],
    ] {
        let path = dir.path().join("doc.json");
        let p = path.to_str().unwrap();
        let mut full = args.clone();
        full.extend(["--format", "structured", "--out", p]);
        assert_eq!(run(&full).0, 0, "{args:?}");
        let (code, out, _) = run(&["verify", p]);
        assert_eq!(code, 0, "{args:?}");
        assert!(out.starts_with("valid"), "{out}");

        let tampered = std::fs::read_to_string(&path).unwrap().replacen(
            "\"stake\": \"-1\"",
            "\"stake\": \"1\"",
            1,
        );
        if tampered != std::fs::read_to_string(&path).unwrap() {
            let t = write(dir.path(), "tampered.json", &tampered);
            let (code, out, _) = run(&["verify", &t]);
            assert_eq!(code, 2);
            assert!(out.starts_with("INVALID"));
        }
    }
}

#[test]
fn exports_are_deterministic() {
    for kind in ["bundle", "nerve"] {
        for format in ["text", "structured"] {
            let args = ["export", "hardy", "--kind", kind, "--format", format];
            let (code, first, _) = run(&args);
            assert_eq!(code, 0);
            assert_eq!(run(&args).1, first);
            if format == "text" {
                assert!(
                    first.starts_with("graph") || first.starts_with("digraph"),
                    "{first}"
                );
            } else {
                serde_json::from_str::<Value>(&first).unwrap();
            }
        }
    }
}

#[test]
fn quantum_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let doc = ctxhier_core::workbench::io::Document::Quantum(
        ctxhier_core::workbench::quantum::singlet_experiment(),
    );
    let path = write(
        dir.path(),
        "singlet.json",
        &ctxhier_core::workbench::io::save(&doc),
    );
    let (code, out, _) = run(&["classify", &path]);
    assert_eq!(code, 0);
    assert!(out.contains("tier: probabilistic"));
    let (code, _, _) = run(&["--denom-bound", "2", "classify", &path]);
    assert_eq!(code, 2);
}
