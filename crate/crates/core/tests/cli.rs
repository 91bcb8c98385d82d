use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn conrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conrel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn paper_files(dir: &TempDir) -> String {
    let out = dir.path().join("paper");
    let status = conrel(&[
        "generate",
        "--family",
        "paper",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    out.to_str().unwrap().to_string()
}

fn read_json(p: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn analyze_writes_report_and_matrix() {
    let dir = TempDir::new().unwrap();
    let paper = paper_files(&dir);
    let report = path(&dir, "report.json");
    let csv = path(&dir, "matrix.csv");
    let out = conrel(&[
        "analyze",
        &format!("{paper}/paper-harmony.json"),
        "--samples",
        "200",
        "--seed",
        "42",
        "--out",
        &report,
        "--csv",
        &csv,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = read_json(&report);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["pairs"][0]["label"], "TOTAL_HARMONY");
    assert_eq!(doc["pairs"][0]["harmony_magnitude"], 1.0);
    assert_eq!(doc["redundancy"][0]["redundant"], "g1");
    assert_eq!(doc["redundancy"][0]["witness"], "g2");
    assert!(fs::read_to_string(&report)
        .unwrap()
        .starts_with("{\n  \"schema_version\": 1,"));
    let matrix = fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = matrix.lines().collect();
    assert_eq!(rows[0], ",g1,g2");
    assert!(rows[1].starts_with("g1,") && rows[1].contains("TH"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let paper = paper_files(&dir);
    let mut docs = Vec::new();
    for k in 0..3 {
        let report = path(&dir, &format!("r{k}.json"));
        let out = conrel(&[
            "analyze",
            &format!("{paper}/paper-conflict.json"),
            "--seed",
            "7",
            "--strategy",
            "uniform",
            "--out",
            &report,
        ]);
        assert!(out.status.success());
        docs.push(fs::read(&report).unwrap());
    }
    assert_eq!(docs[0], docs[1]);
    assert_eq!(docs[1], docs[2]);
}

#[test]
fn too_few_samples_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let paper = paper_files(&dir);
    let out = conrel(&[
        "analyze",
        &format!("{paper}/paper-conflict.json"),
        "--samples",
        "1",
        "--seed",
        "1",
        "--out",
        &path(&dir, "r.json"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(">= 2 samples"));
}

#[test]
fn invalid_input_and_flags_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.json");
    fs::write(&bad, r#"{"name":"p","variables":[],"constraints":[]}"#).unwrap();
    let out = conrel(&[
        "analyze",
        &bad,
        "--seed",
        "1",
        "--out",
        &path(&dir, "r.json"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = conrel(&["analyze", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = conrel(&[
        "analyze",
        &path(&dir, "missing.json"),
        "--seed",
        "1",
        "--out",
        "x",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn non_finite_constraint_value_exits_two() {
    let dir = TempDir::new().unwrap();
    let problem = path(&dir, "pole.json");
    fs::write(
        &problem,
        r#"{"name":"pole","variables":[{"name":"x","lower":-1,"upper":1}],
            "constraints":[{"name":"a","kind":"inequality","expr":"1/x"},
                           {"name":"b","kind":"inequality","expr":"x"}]}"#,
    )
    .unwrap();
    let out = conrel(&[
        "analyze",
        &problem,
        "--samples",
        "3",
        "--strategy",
        "grid",
        "--seed",
        "0",
        "--out",
        &path(&dir, "r.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("`a`"), "{stderr}");
}

#[test]
fn generate_affine_with_labels() {
    let dir = TempDir::new().unwrap();
    let problem = path(&dir, "p.json");
    let labels = path(&dir, "labels.json");
    let out = conrel(&[
        "generate",
        "--family",
        "affine",
        "--n",
        "4",
        "--m",
        "3",
        "--plan",
        "1-2:TH,2-3:TC",
        "--seed",
        "5",
        "--out",
        &problem,
        "--labels",
        &labels,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = read_json(&problem);
    assert_eq!(doc["variables"].as_array().unwrap().len(), 4);
    assert_eq!(doc["constraints"].as_array().unwrap().len(), 3);
    let pairs = read_json(&labels)["pairs"].as_array().unwrap().clone();
    let label = |i: &str, j: &str| {
        pairs
            .iter()
            .find(|p| p["i"] == i && p["j"] == j)
            .map(|p| p["label"].as_str().unwrap().to_string())
    };
    assert_eq!(label("c1", "c2").as_deref(), Some("TOTAL_HARMONY"));
    assert_eq!(label("c2", "c3").as_deref(), Some("TOTAL_CONFLICT"));
    assert_eq!(label("c1", "c3").as_deref(), Some("TOTAL_CONFLICT"));

    let report = path(&dir, "r.json");
    assert!(conrel(&[
        "analyze",
        &problem,
        "--seed",
        "3",
        "--samples",
        "50",
        "--out",
        &report
    ])
    .status
    .success());
    let doc = read_json(&report);
    for pair in doc["pairs"].as_array().unwrap() {
        let want = label(pair["i"].as_str().unwrap(), pair["j"].as_str().unwrap()).unwrap();
        assert_eq!(pair["label"], want.as_str());
    }
}

#[test]
fn contradictory_plan_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = conrel(&[
        "generate",
        "--family",
        "affine",
        "--n",
        "3",
        "--m",
        "3",
        "--plan",
        "1-2:TH,2-3:TH,1-3:TC",
        "--out",
        &path(&dir, "p.json"),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pair_gradients_and_decompose_subcommands() {
    let dir = TempDir::new().unwrap();
    let paper = paper_files(&dir);
    let svg = path(&dir, "pc.svg");
    let pair = stdout_json(&conrel(&[
        "pair",
        &format!("{paper}/paper-conflict.json"),
        "-i",
        "g1",
        "-j",
        "g2",
        "--seed",
        "42",
        "--svg-parallel",
        &svg,
    ]));
    assert_eq!(pair["pair"]["label"], "TOTAL_CONFLICT");
    assert_eq!(pair["crossings"], pair["pair"]["conflict_pairs"]);
    assert_eq!(
        fs::read_to_string(&svg)
            .unwrap()
            .matches(r#"class="sample""#)
            .count(),
        200
    );

    let grads = stdout_json(&conrel(&[
        "gradients",
        &format!("{paper}/paper-harmony.json"),
        "--seed",
        "1",
    ]));
    assert_eq!(grads[0]["mean_harmony"], 1.0);

    let dec = stdout_json(&conrel(&[
        "decompose",
        &format!("{paper}/paper-independence.json"),
        "--seed",
        "1",
    ]));
    let subs = dec["decomposition"]["subproblems"].as_array().unwrap();
    assert_eq!(subs.len(), 2);
    assert_eq!(subs[0]["variables"], serde_json::json!(["x1"]));
    assert_eq!(subs[1]["variables"], serde_json::json!(["x2"]));

    let out = conrel(&[
        "pair",
        &format!("{paper}/paper-conflict.json"),
        "-i",
        "g1",
        "-j",
        "g9",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn infer_and_plot_read_a_report() {
    let dir = TempDir::new().unwrap();
    let problem = path(&dir, "p.json");
    assert!(conrel(&[
        "generate", "--family", "affine", "--n", "2", "--m", "3", "--plan", "TH", "--seed", "9",
        "--out", &problem,
    ])
    .status
    .success());
    let report = path(&dir, "r.json");
    assert!(conrel(&[
        "analyze",
        &problem,
        "--seed",
        "2",
        "--samples",
        "40",
        "--out",
        &report
    ])
    .status
    .success());
    let inference = stdout_json(&conrel(&["infer", "--report", &report]));
    assert_eq!(inference["contradictions"], serde_json::json!([]));

    let mut doc = read_json(&report);
    let edges = doc["graph"]["edges"].as_array_mut().unwrap();
    let last = edges
        .iter_mut()
        .find(|e| e["i"] == "c1" && e["j"] == "c3")
        .unwrap();
    last["label"] = "UNKNOWN".into();
    let edited = path(&dir, "unknown.json");
    fs::write(&edited, serde_json::to_string(&doc).unwrap()).unwrap();
    let inference = stdout_json(&conrel(&["infer", "--report", &edited]));
    assert_eq!(inference["inferred"][0]["label"], "TOTAL_HARMONY");
    assert_eq!(
        inference["inferred"][0]["witness"],
        serde_json::json!(["c1", "c2", "c3"])
    );

    let edges = doc["graph"]["edges"].as_array_mut().unwrap();
    let last = edges
        .iter_mut()
        .find(|e| e["i"] == "c1" && e["j"] == "c3")
        .unwrap();
    last["label"] = "TOTAL_CONFLICT".into();
    fs::write(&edited, serde_json::to_string(&doc).unwrap()).unwrap();
    let inference = stdout_json(&conrel(&["infer", "--report", &edited]));
    let contradictions = inference["contradictions"].as_array().unwrap();
    assert_eq!(contradictions.len(), 1);
    // edges are recorded (c1,c2), (c1,c3), (c2,c3); the last one closes the cycle
    assert_eq!(
        (&contradictions[0]["i"], &contradictions[0]["j"]),
        (&"c2".into(), &"c3".into())
    );
    assert_eq!(contradictions[0]["measured"], "TOTAL_HARMONY");
    assert_eq!(contradictions[0]["implied"], "TOTAL_CONFLICT");

    let svg = path(&dir, "s.svg");
    let out = conrel(&[
        "plot", "--report", &report, "--pair", "c1,c2", "--kind", "scatter", "--out", &svg,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        fs::read_to_string(&svg).unwrap().matches("<circle").count(),
        40
    );
    let out = conrel(&[
        "plot", "--report", &report, "--pair", "c1", "--kind", "scatter", "--out", &svg,
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(conrel(&["--help"]).status.code(), Some(0));
    assert_eq!(conrel(&["--version"]).status.code(), Some(0));
}
