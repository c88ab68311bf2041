use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use shellkit_core::generators::generate;
use shellkit_core::Poset;

fn shellkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shellkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn generated(name: &str, size: &str) -> PathBuf {
    let out = shellkit(&["gen", name, size]);
    assert!(out.status.success());
    write(&format!("{name}-{size}.json"), &stdout(&out))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_round_trips() {
    for (name, size) in [
        ("chain", 3),
        ("boolean", 3),
        ("n5", 0),
        ("partition-lattice", 3),
    ] {
        let out = shellkit(&["gen", name, &size.to_string()]);
        assert_eq!(out.status.code(), Some(0));
        let parsed = Poset::from_json(&stdout(&out)).unwrap();
        let direct = generate(name, size).unwrap();
        assert_eq!(parsed.covers(), direct.covers());
        assert_eq!(parsed.names(), direct.names());
    }
    let b3 = json(&shellkit(&["gen", "boolean", "3"]));
    assert_eq!(b3["elements"].as_array().unwrap().len(), 8);
    assert_eq!(b3["covers"].as_array().unwrap().len(), 12);
}

#[test]
fn unknown_generator_is_a_usage_error() {
    assert_eq!(
        shellkit(&["gen", "tetrahedron", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(shellkit(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn ocl_sizes_and_cap() {
    let c3 = generated("chain", "3");
    let a3 = generated("antichain", "3");
    let a9 = generated("antichain", "9");
    let o = json(&shellkit(&["ocl", "--input", p(&c3)]));
    assert_eq!(o["elements"].as_array().unwrap().len(), 4);
    let o = json(&shellkit(&["ocl", "--input", p(&a3)]));
    assert_eq!(o["elements"].as_array().unwrap().len(), 5);
    assert_eq!(o["partitions"][0], serde_json::json!([[0], [1], [2]]));
    let big = shellkit(&["ocl", "--input", p(&a9)]);
    assert_eq!(big.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&big.stderr).contains("cap"));
}

#[test]
fn analyze_reports() {
    let n5 = generated("n5", "0");
    let r = json(&shellkit(&["analyze", "--input", p(&n5)]));
    assert_eq!(r["comodernistic"]["holds"], true);
    assert_eq!(r["sub_m_chain"], serde_json::json!([0, 1, 2, 4]));

    let hex = generated("hexagon", "0");
    let r = json(&shellkit(&["analyze", "--input", p(&hex)]));
    assert_eq!(r["comodernistic"]["holds"], false);
    assert_eq!(r["comodernistic"]["witness"], serde_json::json!([0, 5]));
    assert_eq!(r["sub_m_chain"], Value::Null);

    let c4 = generated("chain", "4");
    let r = json(&shellkit(&["analyze", "--input", p(&c4)]));
    assert_eq!(r["comodernistic"]["holds"], true);
    assert_eq!(r["modernistic"]["holds"], true);
}

#[test]
fn analyze_rejects_non_lattices() {
    let v = generated("v", "0");
    assert_eq!(
        shellkit(&["analyze", "--input", p(&v)]).status.code(),
        Some(2)
    );
}

#[test]
fn label_modes() {
    let n5 = generated("n5", "0");
    let c = json(&shellkit(&[
        "label",
        "--input",
        p(&n5),
        "--mode",
        "comodernistic",
    ]));
    assert_eq!(c["atom_ordering"]["0"], serde_json::json!([1, 3]));
    assert_eq!(c["edges"].as_array().unwrap().len(), 5);

    let lift = shellkit(&["label", "--input", p(&n5), "--mode", "lift"]);
    let value: Value = serde_json::from_slice(&lift.stdout).unwrap();
    assert!(value["label_poset"].is_object());
    let lift_path = write("n5-lift.json", &stdout(&lift));
    let v = shellkit(&[
        "verify",
        "el",
        "--input",
        p(&n5),
        "--labeling",
        p(&lift_path),
    ]);
    assert_eq!(v.status.code(), Some(0));
    let v = shellkit(&[
        "verify",
        "cl",
        "--input",
        p(&n5),
        "--labeling",
        p(&lift_path),
    ]);
    assert_eq!(v.status.code(), Some(0));
}

#[test]
fn label_ocl_uses_merge_indices() {
    let a3 = generated("antichain", "3");
    let ocl = write("o-a3.json", &stdout(&shellkit(&["ocl", "--input", p(&a3)])));
    let r = json(&shellkit(&[
        "label",
        "--input",
        p(&ocl),
        "--mode",
        "ocl",
        "--linext",
        "0",
    ]));
    let partitions: Value = serde_json::from_str(&std::fs::read_to_string(&ocl).unwrap()).unwrap();
    let id_of = |blocks: Value| {
        partitions["partitions"]
            .as_array()
            .unwrap()
            .iter()
            .position(|b| *b == blocks)
            .unwrap()
    };
    let bottom = id_of(serde_json::json!([[0], [1], [2]]));
    let z1z2 = id_of(serde_json::json!([[0, 1], [2]]));
    let z1z3 = id_of(serde_json::json!([[0, 2], [1]]));
    let top = id_of(serde_json::json!([[0, 1, 2]]));
    let label = |x: usize, y: usize| {
        r["edges"]
            .as_array()
            .unwrap()
            .iter()
            .find(|e| e["edge"] == serde_json::json!([x, y]))
            .unwrap()["label"]
            .clone()
    };
    assert_eq!(label(bottom, z1z2), 2);
    assert_eq!(label(bottom, z1z3), 3);
    assert_eq!(label(z1z2, top), 2);
    assert_eq!(
        shellkit(&[
            "label",
            "--input",
            p(&ocl),
            "--mode",
            "ocl",
            "--linext",
            "6"
        ])
        .status
        .code(),
        Some(2)
    );
}

const B2_PASSING: &str = r#"{"edges": [
  {"edge": [0, 1], "label": 1}, {"edge": [0, 2], "label": 2},
  {"edge": [1, 3], "label": 2}, {"edge": [2, 3], "label": 1}]}"#;

const B2_SYMMETRIC: &str = r#"{"edges": [
  {"edge": [0, 1], "label": 1}, {"edge": [0, 2], "label": 1},
  {"edge": [1, 3], "label": 1}, {"edge": [2, 3], "label": 1}]}"#;

#[test]
fn verify_el_exit_codes() {
    let b2 = generated("boolean", "2");
    let good = write("b2-good.json", B2_PASSING);
    let bad = write("b2-bad.json", B2_SYMMETRIC);
    let ok = shellkit(&["verify", "el", "--input", p(&b2), "--labeling", p(&good)]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["verdict"], "pass");

    let fail = shellkit(&["verify", "el", "--input", p(&b2), "--labeling", p(&bad)]);
    assert_eq!(fail.status.code(), Some(1));
    let r = json(&fail);
    let f = &r["failures"][0];
    assert_eq!(f["reason"]["kind"], "multiple_rising_chains");
    assert_eq!(f["reason"]["count"], 2);
    assert_eq!(f["chains"].as_array().unwrap().len(), 2);

    let strict = shellkit(&[
        "verify",
        "el",
        "--input",
        p(&b2),
        "--labeling",
        p(&good),
        "--strict-lex",
    ]);
    assert_eq!(strict.status.code(), Some(0));
    assert_eq!(
        shellkit(&["verify", "el", "--input", p(&b2)]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_prop51() {
    let a3 = generated("antichain", "3");
    let r = shellkit(&["verify", "prop51", "--input", p(&a3)]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(json(&r)["stats"]["linear_extensions_checked"], 6);

    let split = write(
        "split-chain.json",
        r#"{"elements": ["z0", "z1", "z2", "z3"], "covers": [[0, 2], [2, 3]]}"#,
    );
    assert_eq!(
        shellkit(&["verify", "prop51", "--input", p(&split)])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn verify_rao_and_shelling() {
    let n5 = generated("n5", "0");
    let hex = generated("hexagon", "0");
    let found = shellkit(&["verify", "rao", "--input", p(&n5)]);
    assert_eq!(found.status.code(), Some(0));
    let table = write("n5-table.json", &stdout(&found));
    let check = shellkit(&["verify", "rao", "--input", p(&n5), "--labeling", p(&table)]);
    assert_eq!(check.status.code(), Some(0));
    assert_eq!(
        shellkit(&["verify", "rao", "--input", p(&hex)])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        shellkit(&["verify", "rao", "--input", p(&n5), "--cap", "3"])
            .status
            .code(),
        Some(2)
    );

    assert_eq!(
        shellkit(&["verify", "shelling", "--input", p(&n5)])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        shellkit(&["verify", "shelling", "--input", p(&hex)])
            .status
            .code(),
        Some(1)
    );
    let b4 = generated("boolean", "4");
    assert_eq!(
        shellkit(&["verify", "shelling", "--input", p(&b4)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        shellkit(&[
            "verify",
            "shelling",
            "--input",
            p(&n5),
            "--paper-dim-formula"
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        shellkit(&["verify", "shelling", "--input", p(&n5), "--cap", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn corpus_counts() {
    let out = stdout(&shellkit(&["corpus", "4"]));
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(
        rows.iter()
            .filter(|r| r.split(',').nth(1) == Some("4"))
            .count(),
        2
    );

    let out = stdout(&shellkit(&["corpus", "5"]));
    assert_eq!(
        out.lines()
            .skip(1)
            .filter(|r| r.split(',').nth(1) == Some("5"))
            .count(),
        5
    );

    let out = stdout(&shellkit(&["corpus", "1"]));
    assert_eq!(out.lines().count(), 2);
    assert!(out.lines().nth(1).unwrap().starts_with("0,1,0,"));

    assert_eq!(shellkit(&["corpus", "9"]).status.code(), Some(2));

    let lines = stdout(&shellkit(&["corpus", "4", "--format", "json"]));
    let first: Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(first["classification"]["size"], 1);
    assert!(first["lattice"]["elements"].is_array());
}

#[test]
fn outputs_are_deterministic() {
    let n5 = generated("n5", "0");
    for args in [
        vec!["corpus", "6"],
        vec!["label", "--input", p(&n5), "--mode", "lift"],
        vec!["export", "--input", p(&n5), "--format", "json"],
    ] {
        assert_eq!(shellkit(&args).stdout, shellkit(&args).stdout);
    }
}

#[test]
fn export_dot() {
    let n5 = generated("n5", "0");
    let plain = stdout(&shellkit(&["export", "--input", p(&n5)]));
    assert!(plain.starts_with("digraph hasse {"));
    assert!(plain.contains("rankdir=BT"));
    assert_eq!(plain.matches("->").count(), 5);

    let lift = write(
        "n5-lift-export.json",
        &stdout(&shellkit(&["label", "--input", p(&n5), "--mode", "lift"])),
    );
    let labeled = stdout(&shellkit(&[
        "export",
        "--input",
        p(&n5),
        "--labeling",
        p(&lift),
    ]));
    assert_eq!(labeled.matches("tooltip=").count(), 5);

    let dot = stdout(&shellkit(&[
        "label",
        "--input",
        p(&n5),
        "--mode",
        "comodernistic",
        "--format",
        "dot",
    ]));
    assert!(dot.contains("n0 -> n3 [label=\"3\"]"));
}

#[test]
fn thread_cap_env() {
    let ok = Command::new(env!("CARGO_BIN_EXE_shellkit"))
        .args(["corpus", "3"])
        .env("SHELLKIT_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_shellkit"))
        .args(["corpus", "3"])
        .env("SHELLKIT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
