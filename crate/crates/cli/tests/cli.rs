//! End-to-end runs of the `thhforge` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SCHEMA: &str = include_str!("../schema/output.schema.json");

fn thhforge(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thhforge"))
        .args(args)
        .env("THHFORGE_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn validate(json: &Value) {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(json) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "schema violations: {msgs:?}");
}

fn json_of(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn documented_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = |args: &[&str]| {
        let o = thhforge(dir.path(), args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        String::from_utf8(o.stdout).unwrap()
    };
    assert_eq!(out(&["steenrod", "rank", "--subalgebra", "A2"]), "64\n");
    assert_eq!(out(&["steenrod", "quotient", "--subalgebra", "A2", "--ideal", "Sq1,Sq2Sq3", "--total-rank"]), "24\n");
    assert!(out(&["steenrod", "basis", "--degree", "0"]).starts_with("1\n"));
    let hh = out(&["hh", "compute", "--preset", "idempotent"]);
    assert!(hh.contains("HH_0: 2") && hh.contains("HH_6: 0"), "{hh}");
}

#[test]
fn every_command_emits_schema_valid_json() {
    let dir = tempfile::tempdir().unwrap();
    let custom = concat!(env!("CARGO_MANIFEST_DIR"), "/examples-data/custom-poly.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["steenrod", "basis", "--degree", "12"],
        vec!["steenrod", "rank", "--subalgebra", "A1"],
        vec!["steenrod", "quotient", "--subalgebra", "A2", "--ideal", "Sq1,Sq2"],
        vec![
            "steenrod", "kernel", "--subalgebra", "A2", "--map", "Sq4", "--source-ideal", "Sq1,Sq2Sq3",
            "--source-shift", "4", "--target-ideal", "Sq1,Sq2",
        ],
        vec!["steenrod", "pair", "--element", "Sq4", "--monomial", "xi1^4"],
        vec!["hh", "compute", "--preset", "ext1", "--maxdeg", "8", "--reps"],
        vec!["bokstedt", "run", "--spectrum", "ko", "--maxdeg", "24"],
        vec!["bokstedt", "run", "--spectrum", "custom", "--presentation", custom, "--maxdeg", "12"],
        vec!["adams", "run", "--target", "thh-ko-Y", "--maxdeg", "30"],
        vec!["verify", "--only", "3,6"],
    ];
    for mut args in runs {
        args.extend(["--format", "json"]);
        let v = json_of(&thhforge(dir.path(), &args));
        validate(&v);
    }
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["bokstedt", "run", "--spectrum", "ku", "--p", "2", "--maxdeg", "40", "--format", "json"][..],
        &["adams", "run", "--target", "thh-ku-mod2", "--maxdeg", "60", "--format", "json"][..],
        &["adams", "run", "--target", "thh-ku-mod2", "--maxdeg", "60", "--format", "svg"][..],
        &["hh", "compute", "--preset", "poly2", "--p", "3", "--maxdeg", "12", "--format", "csv"][..],
    ] {
        let a = thhforge(dir.path(), args);
        let b = thhforge(dir.path(), args);
        assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn bokstedt_ku_series_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_of(&thhforge(dir.path(), &["bokstedt", "run", "--spectrum", "ku", "--p", "2", "--maxdeg", "40", "--format", "json"]));
    let series: Vec<u64> = serde_json::from_value(v["result"]["abutment"]["series"].clone()).unwrap();
    // H_*(ku) ⊗ E(σξ̄₁², σξ̄₂²) ⊗ P(σξ̄₃): P on 2, 6, 7, 15, 31, 8; E on 3, 7
    let mut want = vec![0u64; 41];
    want[0] = 1;
    for (d, h) in [(2, 0), (6, 0), (7, 0), (15, 0), (31, 0), (8, 0), (3, 2), (7, 2)] {
        let mut next = vec![0u64; 41];
        for i in 0..=40usize {
            let mut e = 0;
            while i + e * d <= 40 && (h == 0 || e < h) {
                next[i + e * d] += want[i];
                e += 1;
            }
        }
        want = next;
    }
    assert_eq!(series, want);
}

#[test]
fn adams_writes_chart() {
    let dir = tempfile::tempdir().unwrap();
    let chart = dir.path().join("out.svg");
    let o = thhforge(
        dir.path(),
        &["adams", "run", "--target", "thh-ku-mod2", "--maxdeg", "60", "--chart", chart.to_str().unwrap()],
    );
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("d^10(μ^4) = v1^10·λ1·μ"), "{text}");
    assert!(text.contains("π_3: x_{1,0} (v1^2-torsion)"), "{text}");
    let svg = std::fs::read_to_string(chart).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // bad arguments
    assert_eq!(code(&thhforge(dir.path(), &["steenrod", "rank"])), 2);
    assert_eq!(code(&thhforge(dir.path(), &["steenrod", "frobnicate"])), 2);
    assert_eq!(code(&thhforge(dir.path(), &["bokstedt", "run", "--spectrum", "ku", "--maxdeg", "500"])), 2);
    assert_eq!(code(&thhforge(dir.path(), &["bokstedt", "run", "--spectrum", "ku", "--p", "4"])), 2);
    // computation failures surface the stage
    let o = thhforge(dir.path(), &["bokstedt", "run", "--spectrum", "j", "--maxdeg", "24"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("build_e2"));
    assert_eq!(code(&thhforge(dir.path(), &["steenrod", "rank", "--subalgebra", "A"])), 1);
    // the suite refuses a range below 20
    let o = thhforge(dir.path(), &["verify", "--maxdeg", "19"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("insufficient range"));
}

#[test]
fn corrupted_cache_is_rebuilt_and_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = thhforge(dir.path(), &["verify", "--only", "1", "--format", "json"]);
    assert_eq!(json_of(&o)["result"]["passed"], 1);
    std::fs::write(dir.path().join("adem-v1.json"), "{\"version\": 1, \"bases\": [[[3, 3]]]}").unwrap();
    let o = thhforge(dir.path(), &["verify", "--only", "1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("PASS") && text.contains("adem cache rebuilt"), "{text}");
    let o = thhforge(dir.path(), &["verify", "--only", "1"]);
    assert!(String::from_utf8(o.stdout).unwrap().contains("adem cache hit"));
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("thhforge.toml");
    std::fs::write(&cfg, "p = 3\nmaxdeg = 30\nspectrum = \"hz\"\nformat = \"json\"\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v = json_of(&thhforge(dir.path(), &["--config", c, "bokstedt", "run"]));
    assert_eq!((v["config"]["p"].as_u64(), v["config"]["maxdeg"].as_u64()), (Some(3), Some(30)));
    assert_eq!(v["result"]["spectrum"], "hz");
    let v = json_of(&thhforge(dir.path(), &["--config", c, "bokstedt", "run", "--maxdeg", "20", "--spectrum", "ell"]));
    assert_eq!(v["config"]["maxdeg"].as_u64(), Some(20));
    assert_eq!(v["config"]["spectrum"], "ell");
    std::fs::write(&cfg, "colour = \"red\"\n").unwrap();
    assert_eq!(code(&thhforge(dir.path(), &["--config", c, "steenrod", "rank", "--subalgebra", "A1"])), 2);
}
