use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gframemod_core::frame::fusion_frame;
use gframemod_core::{
    CMatrix, Complex64, FrameDocument, GFusionFrame, IndexConvention, ModuleOperator, Submodule,
};
use serde_json::Value;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn gframemod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gframemod"))
        .env_remove("GFRAMEMOD_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn diag(entries: &[f64]) -> ModuleOperator {
    let k = entries.len();
    let m = CMatrix::from_fn(k, k, |i, j| {
        Complex64::new(if i == j { entries[i] } else { 0.0 }, 0.0)
    });
    ModuleOperator::from_matrix(k, 1, m).unwrap()
}

fn write_frame(dir: &TempDir, name: &str, frame: &GFusionFrame) -> PathBuf {
    let path = dir.path().join(name);
    let doc = FrameDocument::from_frame(frame, Default::default());
    std::fs::write(&path, doc.to_canonical_json()).unwrap();
    path
}

/// Both coordinate projections of `C^2` with unit weights.
fn two_projections() -> GFusionFrame {
    let subs =
        [diag(&[1.0, 0.0]), diag(&[0.0, 1.0])].map(|p| Submodule::from_projection(p).unwrap());
    fusion_frame(&subs, &[1.0, 1.0], IndexConvention::Linear).unwrap()
}

fn scaled_copy(dir: &TempDir, src: &Path, factor: f64) -> PathBuf {
    let doc = FrameDocument::parse(&std::fs::read_to_string(src).unwrap()).unwrap();
    write_frame(dir, "scaled.json", &doc.to_frame().unwrap().scaled(factor))
}

#[test]
fn analyze_parseval_fusion() {
    let out = gframemod(&["analyze", path_str(&data("fusion_parseval.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["results"];
    assert_eq!(r["tight"], Value::Bool(true));
    assert!((num(&r["bounds"]["lower"]) - 1.0).abs() < 1e-10);
    assert!((num(&r["bounds"]["upper"]) - 1.0).abs() < 1e-10);
    assert_eq!(r["dual"]["verified"], Value::Bool(true));
}

#[test]
fn analyze_unitary_orbit_has_bounds_four() {
    let out = gframemod(&["analyze", path_str(&data("unitary_orbit_m4.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["results"];
    assert_eq!(r["tight"], Value::Bool(true));
    assert!((num(&r["bounds"]["lower"]) - 4.0).abs() < 1e-10);
    assert!((num(&r["bounds"]["upper"]) - 4.0).abs() < 1e-10);
}

#[test]
fn single_submodule_is_not_a_frame() {
    let dir = TempDir::new().unwrap();
    let sub = Submodule::from_projection(diag(&[1.0, 0.0])).unwrap();
    let frame = fusion_frame(&[sub], &[1.0], IndexConvention::Linear).unwrap();
    let path = write_frame(&dir, "lone.json", &frame);
    let out = gframemod(&["analyze", path_str(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("frame"));
}

#[test]
fn usage_and_parse_errors_exit_one() {
    assert_eq!(gframemod(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        gframemod(&["analyze", "/nonexistent/frame.json"])
            .status
            .code(),
        Some(1)
    );
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"d\": 1}").unwrap();
    assert_eq!(
        gframemod(&["analyze", path_str(&bad)]).status.code(),
        Some(1)
    );
    assert_eq!(gframemod(&["--help"]).status.code(), Some(0));
}

#[test]
fn dilation_is_representable_with_lower_bound_caveat() {
    let out = gframemod(&["represent", path_str(&data("dilation_m3.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let rep = &report["results"]["representation"];
    assert!(num(&rep["residual"]) <= 1e-10);
    assert!((num(&rep["norm_t"]) - 0.5).abs() < 1e-10);
    assert_eq!(
        report["results"]["norm_bounds"]["lower_holds"],
        Value::Bool(false)
    );
    let caveats = report["caveats"].as_array().unwrap();
    assert!(caveats
        .iter()
        .any(|c| c.as_str().unwrap().contains("lower bound")));
}

#[test]
fn theorem_check_on_dilation_is_a_verification_failure() {
    let out = gframemod(&[
        "represent",
        path_str(&data("dilation_m3.json")),
        "--check-theorem21",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(
        json(&out)["results"]["theorem21"]["lower_pass"],
        Value::Bool(false)
    );
}

#[test]
fn two_projections_are_not_representable() {
    let dir = TempDir::new().unwrap();
    let path = write_frame(&dir, "pair.json", &two_projections());
    let out = gframemod(&["represent", path_str(&path)]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["results"];
    assert_eq!(r["representable"], Value::Bool(false));
    assert!((num(&r["representation"]["residual"]) - 1.0).abs() < 1e-8);
}

#[test]
fn unitary_orbit_certificate_window() {
    let out = gframemod(&[
        "represent",
        path_str(&data("unitary_orbit_m4.json")),
        "--tight-certificate",
        "--vector",
        path_str(&data("unit_vector_n2_d2.json")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let cert = &json(&out)["results"]["certificate"]["report"];
    assert_eq!(cert["window"], Value::from(4));
    assert_eq!(cert["constant_norms"], Value::Bool(true));
}

#[test]
fn perturb_identical_documents() {
    let p = data("random_n2_d2_m4.json");
    let out = gframemod(&[
        "perturb",
        path_str(&p),
        path_str(&p),
        "--samples",
        "16",
        "--vec-samples",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["results"];
    assert_eq!(r["inequality_holds"], Value::Bool(true));
    for side in ["lower", "upper"] {
        let derived = num(&r["derived_bounds"][side]);
        let empirical = num(&r["empirical_bounds"][side]);
        assert!((derived - empirical).abs() <= 1e-10 * empirical);
    }
}

#[test]
fn perturb_scaled_family() {
    let dir = TempDir::new().unwrap();
    let base = data("random_n2_d2_m4.json");
    let scaled = scaled_copy(&dir, &base, 1.1);
    let args = |eta: &'static str| {
        vec![
            "perturb".to_string(),
            path_str(&base).to_string(),
            path_str(&scaled).to_string(),
            "--eta".into(),
            eta.into(),
            "--samples".into(),
            "16".into(),
            "--vec-samples".into(),
            "4".into(),
        ]
    };
    let run = |a: Vec<String>| gframemod(&a.iter().map(String::as_str).collect::<Vec<_>>());

    let pass = run(args("0.1"));
    assert_eq!(pass.status.code(), Some(0));
    let r = &json(&pass)["results"];
    assert_eq!(r["inequality_holds"], Value::Bool(true));
    let derived = num(&r["derived_bounds"]["upper"]);
    assert!((derived - num(&r["empirical_bounds"]["upper"])).abs() <= 1e-8 * derived);

    let fail = run(args("0.05"));
    assert_eq!(fail.status.code(), Some(3));
    let w = &json(&fail)["results"]["witness"];
    // Scaling by 1.1 makes the ratio exactly 0.1 / 0.05.
    assert!((num(&w["lhs"]) / num(&w["rhs"]) - 2.0).abs() < 1e-8);
}

#[test]
fn perturb_rejects_mismatched_shapes() {
    let out = gframemod(&[
        "perturb",
        path_str(&data("random_n2_d2_m4.json")),
        path_str(&data("dilation_m3.json")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn independence_verdicts() {
    let dir = TempDir::new().unwrap();
    let pair = write_frame(&dir, "pair.json", &two_projections());
    let out = gframemod(&["independence", path_str(&pair)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["report"]["verdict"], "independent");

    let out = gframemod(&["independence", path_str(&data("dilation_m3.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["results"]["report"];
    assert_eq!(r["verdict"], "dependent");
    assert_eq!(r["span_invariance"]["invariant"], Value::Bool(true));

    let out = gframemod(&["independence", path_str(&data("random_n2_d2_m4.json"))]);
    assert_eq!(json(&out)["results"]["report"]["verdict"], "independent");
}

#[test]
fn gen_is_deterministic_and_matches_bundled_data() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let flags = [
        "--kind", "fusion", "--n", "2", "--d", "1", "--m", "2", "--seed", "7",
    ];
    for out in [&a, &b] {
        let mut args = vec!["gen"];
        args.extend(flags);
        args.push(path_str(out));
        assert_eq!(gframemod(&args).status.code(), Some(0));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(bytes, std::fs::read(data("fusion_parseval.json")).unwrap());

    let out = gframemod(&["analyze", path_str(&a)]);
    assert_eq!(json(&out)["results"]["tight"], Value::Bool(true));
}

#[test]
fn gen_dilation_is_representable() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("dil.json");
    let out = gframemod(&[
        "gen",
        "--kind",
        "dilation",
        "--m",
        "3",
        "--seed",
        "0",
        path_str(&path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = gframemod(&["represent", path_str(&path)]);
    assert!(num(&json(&out)["results"]["representation"]["residual"]) <= 1e-10);
}

#[test]
fn gen_rejects_zero_dimensions() {
    let out = gframemod(&["gen", "--kind", "random", "--n", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_flag_writes_the_report() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("report.json");
    let out = gframemod(&[
        "analyze",
        path_str(&data("fusion_parseval.json")),
        "--output",
        path_str(&path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(report["command"], "analyze");
    assert_eq!(report["inputs_digest"].as_str().unwrap().len(), 64);
    assert!(report["version"].is_string());
}

#[test]
fn seed_comes_from_the_environment() {
    let p = data("unitary_orbit_m4.json");
    let out = Command::new(env!("CARGO_BIN_EXE_gframemod"))
        .env("GFRAMEMOD_SEED", "42")
        .args(["represent", path_str(&p), "--check-theorem21"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["seed"], Value::from(42));

    let flag = gframemod(&[
        "represent",
        path_str(&p),
        "--check-theorem21",
        "--seed",
        "42",
    ]);
    assert_eq!(out.stdout, flag.stdout);
}

#[test]
fn bundled_documents_round_trip_bytewise() {
    for name in [
        "dilation_m3.json",
        "fusion_parseval.json",
        "random_n2_d2_m4.json",
        "unitary_orbit_m4.json",
    ] {
        let text = std::fs::read_to_string(data(name)).unwrap();
        let doc = FrameDocument::parse(&text).unwrap();
        assert_eq!(doc.to_canonical_json(), text.trim_end(), "{name}");
    }
}
