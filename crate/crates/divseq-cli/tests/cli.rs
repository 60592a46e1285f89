//! End-to-end runs of the binary: artifact contents, determinism, overrides,
//! and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divseq"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_job(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr_error(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(&text).unwrap_or_else(|_| panic!("stderr is not JSON: {text}"))
}

const GM_SHOWCASE: &str = r#"
group = gm
coords = ["t", "1 - t"]
nmax = 40
"#;

#[test]
fn torus_showcase_report_and_series() {
    let tmp = tempfile::tempdir().unwrap();
    let job = write_job(tmp.path(), "gm.job", GM_SHOWCASE);
    let out = run(&["--job", &job, "--out", "run"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let report = read_json(&tmp.path().join("run/report.json"));
    assert_eq!(report["group"], "gm");
    assert_eq!(report["report"]["progression_moduli"], serde_json::json!([6]));
    assert_eq!(report["report"]["complement_density"], "5/6");
    assert_eq!(report["report"]["progression_consistent"], true);
    assert_eq!(
        report["report"]["bound_divisor"]["places"][0]["poly"],
        "t^2 - t + 1"
    );

    let csv = std::fs::read_to_string(tmp.path().join("run/series.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,degree,support_size,equals_d1"));
    assert_eq!(lines.next(), Some("1,0,0,1"));
    assert!(csv.lines().any(|l| l == "6,2,1,0"), "n = 6 picks up the place");
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let job = write_job(tmp.path(), "gm.job", GM_SHOWCASE);
    for dir in ["a", "b"] {
        let out = run(&["--job", &job, "--out", dir], tmp.path());
        assert!(out.status.success());
    }
    for name in ["report.json", "series.csv"] {
        let a = std::fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
}

#[test]
fn flag_overrides_job_key() {
    let tmp = tempfile::tempdir().unwrap();
    let job = write_job(tmp.path(), "gm.job", GM_SHOWCASE);
    let out = run(
        &["--job", &job, "--out", "short", "--nmax", "24", "--format", "json"],
        tmp.path(),
    );
    assert!(out.status.success());
    let report = read_json(&tmp.path().join("short/report.json"));
    assert_eq!(report["report"]["horizon"], 24);
    assert!(!tmp.path().join("short/series.csv").exists(), "format=json skips the CSV");
}

#[test]
fn elliptic_run_embeds_certificate_and_round_trips_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let job = write_job(
        tmp.path(),
        "ec.job",
        r#"
group = ec
a_invariants = ["0", "0", "0", "-t^2", "t^2"]
point = ["t", "t"]
nmax = 12
seed = 0
"#,
    );
    let out = run(&["--job", &job, "--out", "run"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&tmp.path().join("run/report.json"));
    assert_eq!(report["certificate"]["verdict"], "nontorsion");
    assert_eq!(report["certificate"]["witness"], "1");

    // canonical echoes parse back to themselves
    for echoed in report["inputs"]["a_invariants"].as_array().unwrap() {
        let src = echoed.as_str().unwrap();
        let reparsed = divseq::parse::parse_ratfun(src).unwrap();
        assert_eq!(reparsed.to_string(), src, "echo is not canonical");
    }
    assert_eq!(report["inputs"]["point"], serde_json::json!(["t", "t"]));
    assert_eq!(report["report"]["horizon"], 12);
}

#[test]
fn singular_model_is_a_hypothesis_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let job = write_job(
        tmp.path(),
        "cusp.job",
        "group = ec\na_invariants = [\"0\", \"0\", \"0\", \"0\", \"0\"]\npoint = [\"0\", \"0\"]\n",
    );
    let out = run(&["--job", &job], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    let err = stderr_error(&out);
    assert_eq!(err["error"]["exit_code"], 3);
    assert_eq!(err["error"]["kind"], "hypothesis");
    assert!(err["error"]["message"].as_str().unwrap().contains("discriminant"));
}

#[test]
fn torsion_base_point_is_rejected_with_its_order() {
    let tmp = tempfile::tempdir().unwrap();
    let job = write_job(
        tmp.path(),
        "torsion.job",
        "group = ec\na_invariants = [\"0\", \"0\", \"1\", \"0\", \"0\"]\npoint = [\"0\", \"0\"]\n",
    );
    let out = run(&["--job", &job], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    let msg = stderr_error(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("torsion of order 3"), "{msg}");
}

#[test]
fn power_relation_inside_horizon_is_reported() {
    use divseq::ellff::{EllCurveFF, EllPointFF};
    use divseq::parse::parse_ratfun;

    let rf = |s: &str| parse_ratfun(s).unwrap();
    let curve = EllCurveFF::short(rf("-t^2"), rf("t^2")).unwrap();
    let p = EllPointFF::affine(rf("t"), rf("t"));
    let (qx, qy) = {
        let q = curve.mul(3, &p).unwrap();
        let (x, y) = q.coordinates().unwrap();
        (x.to_string(), y.to_string())
    };

    let tmp = tempfile::tempdir().unwrap();
    let job = write_job(
        tmp.path(),
        "rel.job",
        &format!(
            "group = ec\na_invariants = [\"0\", \"0\", \"0\", \"-t^2\", \"t^2\"]\n\
             point = [\"t\", \"t\"]\nq_point = [\"{qx}\", \"{qy}\"]\nnmax = 10\n"
        ),
    );
    let out = run(&["--job", &job], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    let msg = stderr_error(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("3P = Q"), "{msg}");
}

#[test]
fn malformed_job_text_gets_position() {
    let tmp = tempfile::tempdir().unwrap();
    let job = write_job(tmp.path(), "bad.job", "group = gm\ncoords = [\"t\" \"u\"]\n");
    let out = run(&["--job", &job], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_error(&out);
    assert_eq!(err["error"]["kind"], "parse");
    let msg = err["error"]["message"].as_str().unwrap();
    assert!(msg.contains("line 2, column 15"), "{msg}");
}

#[test]
fn bad_embedded_expression_points_at_its_key() {
    let tmp = tempfile::tempdir().unwrap();
    let job = write_job(tmp.path(), "expr.job", "group = gm\ncoords = [\"t +\"]\n");
    let out = run(&["--job", &job], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr_error(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("line 2") && msg.contains("`coords`"), "{msg}");
}

#[test]
fn independence_verdict_reports_the_relation() {
    let tmp = tempfile::tempdir().unwrap();
    let job = write_job(
        tmp.path(),
        "dep.job",
        "group = indep\ncoords = [\"t\", \"t + 1\", \"t^2 + t\"]\nmode = exact\n",
    );
    let out = run(&["--job", &job, "--out", "run"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&tmp.path().join("run/report.json"));
    assert_eq!(report["report"]["verdict"], "dependent");
    let rel: Vec<i64> = report["report"]["relation"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_i64().unwrap())
        .collect();
    // t^1 (t+1)^1 (t^2+t)^-1 = 1, up to sign of the whole vector
    assert!(rel == [1, 1, -1] || rel == [-1, -1, 1], "{rel:?}");
    assert!(!tmp.path().join("run/series.csv").exists(), "no series for verdicts");
}

#[test]
fn integer_comparator_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let job = write_job(tmp.path(), "int.job", "group = intseq\na = 2\nb = 3\nnmax = 12\n");
    let out = run(&["--job", &job, "--out", "run"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&tmp.path().join("run/report.json"));
    assert_eq!(report["report"]["baseline"], "1");
    let values = report["report"]["values"].as_array().unwrap();
    assert_eq!(values[10]["gcd"], "23", "gcd(2^11 - 1, 3^11 - 1)");
    assert_eq!(values[11]["gcd"], "455", "gcd(2^12 - 1, 3^12 - 1)");
    let csv = std::fs::read_to_string(tmp.path().join("run/series.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("12,455,")), "{csv}");
}

#[test]
fn mixed_product_run_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let job = write_job(
        tmp.path(),
        "mixed.job",
        r#"
group = mixed
a_invariants = ["0", "0", "0", "-t^2", "t^2"]
point = ["t", "t"]
coords = ["t"]
nmax = 10
"#,
    );
    let out = run(&["--job", &job, "--out", "run"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&tmp.path().join("run/report.json"));
    assert_eq!(report["group"], "mixed");
    assert_eq!(report["certificate"]["verdict"], "nontorsion");
    assert_eq!(report["report"]["horizon"], 10);
    // minima of two effective sequences are effective and bounded
    assert!(report["report"]["bound_check"]["stable_tail"].is_boolean());
}

#[test]
fn unknown_key_for_group_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let job = write_job(
        tmp.path(),
        "wrong.job",
        "group = intseq\na = 2\nb = 3\ncoords = [\"t\"]\n",
    );
    let out = run(&["--job", &job], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr_error(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("does not apply"), "{msg}");
}
