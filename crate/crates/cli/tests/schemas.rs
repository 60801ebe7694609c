//! Validates every JSON document the binary emits or writes against the
//! schemas shipped under docs/schemas, by running each command end to end.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn pcgraph(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcgraph"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

fn load_schema(name: &str) -> jsonschema::Validator {
    let path = schema_dir().join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    let doc: Value = serde_json::from_str(&text).expect("schema is JSON");
    jsonschema::validator_for(&doc).unwrap_or_else(|e| panic!("{name} compiles: {e}"))
}

fn assert_valid(schema: &jsonschema::Validator, doc: &Value, what: &str) {
    let errors: Vec<String> = schema.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{what} violates its schema: {errors:?}\ndoc: {doc}");
}

fn stdout_doc(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn file_doc(path: &Path) -> Value {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    serde_json::from_str(&text).expect("file is JSON")
}

/// One gen run shared by the localize/decompose checks.
fn gen_instance(dir: &Path) -> Value {
    let out = pcgraph(
        dir,
        &[
            "gen", "--nodes", "60", "--radius", "0.22", "--seed", "4", "--out-graph", "g.edges",
            "--ball-center", "7", "--ball-hops", "2", "--magnitude", "1.5", "--sigma2", "0.01",
            "--out-signal", "x.csv", "--out-truth", "truth.json",
        ],
    );
    stdout_doc(&out)
}

#[test]
fn emitted_json_matches_shipped_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    let gen_schema = load_schema("gen_result.schema.json");
    let piece_schema = load_schema("piece.schema.json");
    let localize_schema = load_schema("localize_result.schema.json");
    let decompose_schema = load_schema("decompose_result.schema.json");

    let gen_doc = gen_instance(dir);
    assert_valid(&gen_schema, &gen_doc, "gen stdout");
    assert_valid(&piece_schema, &file_doc(&dir.join("truth.json")), "truth file");

    for method in ["hard", "cut", "path", "combined"] {
        let out = pcgraph(
            dir,
            &["localize", "--graph", "g.edges", "--signal", "x.csv", "--method", method],
        );
        assert_valid(&localize_schema, &stdout_doc(&out), &format!("localize {method} stdout"));
    }
    let unknown = pcgraph(
        dir,
        &["localize", "--graph", "g.edges", "--signal", "x.csv", "--unknown-magnitude"],
    );
    assert_valid(&localize_schema, &stdout_doc(&unknown), "localize --unknown-magnitude stdout");

    let decomposed = pcgraph(
        dir,
        &["decompose", "--graph", "g.edges", "--signal", "x.csv", "--pieces", "2"],
    );
    assert_valid(&decompose_schema, &stdout_doc(&decomposed), "decompose stdout");
}

#[test]
fn learn_artifacts_match_shipped_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    let learn_schema = load_schema("learn_result.schema.json");
    let dict_schema = load_schema("dictionary.schema.json");
    let coef_schema = load_schema("coefficients.schema.json");
    let usage_schema = load_schema("usage.schema.json");

    gen_instance(dir);
    // A small signal matrix: four shifted copies of the planted column.
    let one = std::fs::read_to_string(dir.join("x.csv")).unwrap();
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, line) in one.lines().skip(1).enumerate() {
        let value = line.split(',').nth(1).unwrap();
        rows.push(vec![i.to_string(), value.into(), value.into(), value.into(), value.into()]);
    }
    let mut csv = String::from("node,s0,s1,s2,s3\n");
    for row in rows {
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    std::fs::write(dir.join("xs.csv"), csv).unwrap();

    let out = pcgraph(
        dir,
        &[
            "learn", "--graph", "g.edges", "--signals", "xs.csv", "--atoms", "2", "--sparsity",
            "1", "--iters", "3", "--out-dir", "learned",
        ],
    );
    let doc = stdout_doc(&out);
    assert_valid(&learn_schema, &doc, "learn stdout");
    assert_valid(&dict_schema, &file_doc(&dir.join("learned/dictionary.json")), "dictionary file");
    assert_valid(
        &coef_schema,
        &file_doc(&dir.join("learned/coefficients.json")),
        "coefficients file",
    );
    assert_valid(&usage_schema, &file_doc(&dir.join("learned/usage.json")), "usage file");
}

#[test]
fn curves_config_and_result_match_shipped_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    let config_schema = load_schema("experiment_config.schema.json");
    let curves_schema = load_schema("curves_result.schema.json");

    let config = serde_json::json!({
        "graph": {"geometric": {"n": 50, "radius": 0.25, "seed": 1}},
        "task": "localize",
        "shape": {"ball": {"hops": 1}},
        "sigma2_levels": [0.1, 0.4],
        "trials": 3,
        "seed": 5,
        "methods": ["hard", "glap"],
        "glap_lambdas": [0.5],
        "out_dir": "curves"
    });
    assert_valid(&config_schema, &config, "experiment config");
    std::fs::write(dir.join("cfg.json"), serde_json::to_string_pretty(&config).unwrap()).unwrap();

    let out = pcgraph(dir, &["curves", "--config", "cfg.json"]);
    assert_valid(&curves_schema, &stdout_doc(&out), "curves stdout");
}
