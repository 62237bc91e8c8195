//! End-to-end checks of the command line binary: exit codes, JSON and
//! CSV shapes, config-file precedence, and byte-level reproducibility.

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_besov-approx"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn file_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).expect("file is JSON")
}

/// Torus-rendered extremal function on a small 1D grid; the workhorse
/// input for the pipeline tests.
fn gen_input(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("f.json");
    let out = run(&[
        "gen-extremal",
        "--r",
        "1",
        "--n",
        "2",
        "--rendering",
        "torus",
        "--L",
        "16",
        "--N",
        "512",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(&["gen-extremal", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unresolvable_grid_is_a_domain_error() {
    // block(6) needs sigma = 64 but pi/h is about 6.3 here
    let out = run(&[
        "gen-extremal",
        "--r",
        "1",
        "--n",
        "6",
        "--L",
        "16",
        "--N",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error:"), "stderr: {err}");
}

#[test]
fn missing_parameter_names_the_flag_and_the_config_key() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_input(dir.path());
    let out = run(&["norm", "--in", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing parameter p"), "stderr: {err}");
    assert!(err.contains("--p") && err.contains("p="), "stderr: {err}");
}

#[test]
fn grid_json_has_the_documented_shape() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_input(dir.path());
    let doc = file_json(&input);
    assert_eq!(doc["layout"], "row-major");
    assert_eq!(doc["axes"].as_array().unwrap().len(), 1);
    assert_eq!(doc["axes"][0]["N"], 512);
    assert_eq!(doc["values"].as_array().unwrap().len(), 512);
    assert_eq!(doc["values"][0].as_array().unwrap().len(), 2);
    let digest = doc["config_digest"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(digest.chars().all(|c| c.is_ascii_hexdigit()));
}

#[test]
fn section_pipeline_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_input(dir.path());
    let norm_of = |path: &Path| -> f64 {
        let out = run(&["norm", "--in", path.to_str().unwrap(), "--p", "2"]);
        stdout_json(&out)["norm"].as_f64().unwrap()
    };
    let base = norm_of(&input);
    assert!(base > 0.0);

    // the level-2 shell lives in |lambda| in [2,4]: a cut at 5 keeps
    // everything, a cut at 1 removes everything
    let keep = dir.path().join("keep.json");
    let out = run(&[
        "section",
        "--in",
        input.to_str().unwrap(),
        "--sigma",
        "5",
        "--out",
        keep.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!((norm_of(&keep) - base).abs() <= 1e-10 * base);

    let drop = dir.path().join("drop.json");
    let out = run(&[
        "section",
        "--in",
        input.to_str().unwrap(),
        "--sigma",
        "1",
        "--out",
        drop.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(norm_of(&drop) <= 1e-10 * base);
}

#[test]
fn flags_override_config_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.conf");
    std::fs::write(
        &cfg,
        "# pinned experiment\nr = 1\nn = 3\nrendering = torus\nL = 16\nN = 512\n",
    )
    .unwrap();

    let from_cfg = dir.path().join("a.json");
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "gen-extremal",
        "--out",
        from_cfg.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let label_cfg = file_json(&from_cfg)["label"].as_str().unwrap().to_string();
    assert!(label_cfg.contains("n=3"), "label: {label_cfg}");

    let overridden = dir.path().join("b.json");
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "gen-extremal",
        "--n",
        "2",
        "--out",
        overridden.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let label_flag = file_json(&overridden)["label"]
        .as_str()
        .unwrap()
        .to_string();
    assert!(label_flag.contains("n=2"), "label: {label_flag}");
}

#[test]
fn decompose_writes_one_file_per_layer() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_input(dir.path());
    let prefix = dir.path().join("dec");
    let out = run(&[
        "decompose",
        "--in",
        input.to_str().unwrap(),
        "--r",
        "1",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    let summary = stdout_json(&out);
    // pi/h is about 50, so blocks up to sigma = 32 are resolvable
    assert_eq!(summary["cutoff"], 5);
    let files = summary["files"].as_array().unwrap();
    assert_eq!(files.len(), summary["layers"].as_u64().unwrap() as usize);
    for f in files {
        let doc = file_json(Path::new(f.as_str().unwrap()));
        assert_eq!(doc["values"].as_array().unwrap().len(), 512);
    }
}

#[test]
fn besov_norm_reports_layer_terms() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_input(dir.path());
    let out = run(&[
        "besov-norm",
        "--in",
        input.to_str().unwrap(),
        "--r",
        "1",
        "--p",
        "2",
        "--theta",
        "1",
    ]);
    let doc = stdout_json(&out);
    assert!(doc["norm"].as_f64().unwrap() > 0.0);
    let terms = doc["terms"].as_array().unwrap();
    assert!(!terms.is_empty());
    for t in terms {
        assert!(t["s"].is_u64() && t["lp"].is_f64() && t["weighted"].is_f64());
    }
    assert!(doc["truncation_warning"].is_boolean());
    assert_eq!(doc["config_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn approx_error_reports_a_nonnegative_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = gen_input(dir.path());
    let out = run(&[
        "approx-error",
        "--in",
        input.to_str().unwrap(),
        "--r",
        "1",
        "--n",
        "2",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["n"], 2);
    assert!(doc["error"].as_f64().unwrap() >= 0.0);
}

#[test]
fn rate_csv_is_byte_reproducible_and_the_sidecar_only_varies_in_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec![
            "rate".to_string(),
            "--r".into(),
            "1".into(),
            "--p".into(),
            "2".into(),
            "--theta".into(),
            "1".into(),
            "--n-min".into(),
            "2".into(),
            "--n-max".into(),
            "4".into(),
            "--L".into(),
            "50.26548245743669".into(),
            "--N".into(),
            "2048".into(),
            "--out".into(),
            out.to_str().unwrap().to_string(),
        ]
    };
    let csv1 = dir.path().join("run1.csv");
    let csv2 = dir.path().join("run2.csv");
    for csv in [&csv1, &csv2] {
        let out = bin().args(args(csv)).output().unwrap();
        let summary = stdout_json(&out);
        assert!(summary["excluded"].as_array().unwrap().is_empty());
        assert!(
            (summary["fitted_slope"].as_f64().unwrap()
                - summary["predicted_slope"].as_f64().unwrap())
            .abs()
                <= 0.2
        );
    }
    let text1 = std::fs::read(&csv1).unwrap();
    let text2 = std::fs::read(&csv2).unwrap();
    assert_eq!(
        text1, text2,
        "identical configs must give identical CSV bytes"
    );

    let text = String::from_utf8(text1).unwrap();
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# config_digest="));
    assert_eq!(lines.next().unwrap(), "n,error,log2_error,predicted_log2");
    assert_eq!(lines.count(), 3);

    let strip = |path: &Path| {
        let mut doc = file_json(path);
        let ts = doc.as_object_mut().unwrap().remove("timestamp");
        assert!(ts.is_some(), "sidecar carries a timestamp");
        doc
    };
    let side1 = strip(&dir.path().join("run1.json"));
    let side2 = strip(&dir.path().join("run2.json"));
    assert_eq!(side1, side2, "sidecars agree apart from the timestamp");
}

#[test]
fn verify_quick_prints_one_status_line_per_property() {
    let out = run(&["verify", "--quick"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() >= 2);
    let (summary, props) = lines.split_last().unwrap();
    for line in props {
        assert!(
            line.starts_with("PASS ") || line.starts_with("FAIL "),
            "line: {line}"
        );
    }
    let total = props.len();
    assert!(
        summary.starts_with(&format!("{total} of {total} properties passed")),
        "summary: {summary}"
    );
    assert!(props.iter().all(|l| l.starts_with("PASS ")));
}
