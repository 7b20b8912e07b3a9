use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

const F_MIN: f64 = 6059.714335048436;
const F_BEAM: f64 = 1.339956367;

fn pvopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pvopt"))
        .args(args)
        .env_remove("PVOPT_CLAIM_TOL")
        .env_remove("PVOPT_REPORT_TOL")
        .env_remove("PVOPT_DESIGN_DECIMALS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

/// Value of a `key  value` line in text output.
fn text_field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(|rest| rest.trim().parse::<f64>().unwrap()))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

#[test]
fn vessel_optimum_in_every_format() {
    let j = pvopt(&["optimum", "vessel", "--format", "json"]);
    assert!(j.status.success());
    let doc = json(&j);
    let f = doc["objective"].as_f64().unwrap();
    assert!(((f - F_MIN) / F_MIN).abs() < 1e-9, "{f}");
    assert_eq!(doc["active_constraints"], serde_json::json!([1, 3]));
    assert_eq!(doc["provenance"], "endpoint-argument");
    assert_eq!(doc["curve"]["minimum"], "upper-boundary");
    assert!(doc["curve"]["roots_in_range"].as_array().unwrap().is_empty());

    let t = pvopt(&["optimum", "vessel"]);
    assert!(t.status.success());
    assert_eq!(text_field(&stdout(&t), "objective"), f);

    let c = pvopt(&["optimum", "vessel", "--format", "csv"]);
    assert!(c.status.success());
    let csv = stdout(&c);
    assert!(csv.starts_with("field,value\n"));
    let from_csv: f64 = csv.lines().find_map(|l| l.strip_prefix("objective,")).unwrap().parse().unwrap();
    assert_eq!(from_csv, f);
}

#[test]
fn cantilever_optimum() {
    let o = pvopt(&["optimum", "cantilever", "--format", "json"]);
    assert!(o.status.success());
    let doc = json(&o);
    assert!((doc["objective"].as_f64().unwrap() - F_BEAM).abs() < 1e-8);
    assert!((doc["multipliers"][0]["value"].as_f64().unwrap() - 0.4466521202).abs() < 1e-8);
    assert_eq!(doc["design"].as_array().unwrap().len(), 5);
}

#[test]
fn unknown_problem_is_a_usage_error() {
    let o = pvopt(&["optimum", "frobnicator"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn validate_bundled_corpus() {
    let o = pvopt(&["validate", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = json(&o);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 38);
    let below: Vec<&Value> = rows.iter().filter(|r| r["classification"] == "below-proven-optimum").collect();
    assert_eq!(below.len(), 2);
    assert!(below.iter().all(|r| r["flagged_invalid"] == true));
    assert!(rows.iter().all(|r| r["as_expected"] == true));

    let t = pvopt(&["validate"]);
    assert_eq!(t.status.code(), Some(0));
    let text = stdout(&t);
    assert_eq!(text_field(&text, "below-proven-optimum"), 2.0);
    assert_eq!(text_field(&text, "anomalies"), 0.0);

    let c = pvopt(&["validate", "--format", "csv"]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(stdout(&c).lines().count(), 1 + 38);
}

fn corpus_file(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f.flush().unwrap();
    f
}

#[test]
fn validate_certificate_only_corpus() {
    let f = corpus_file(
        "Exact,vessel,6059.714335,0.8125,0.4375,42.0984455958549,176.6365958424394\n\
         Beam,cantilever,1.3399564,6.0160159,5.3091739,4.4943296,3.5014750,2.15266533\n",
    );
    let o = pvopt(&["validate", f.path().to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let rows = json(&o);
    assert!(rows.as_array().unwrap().iter().all(|r| r["classification"] == "verified"));
}

#[test]
fn validate_reports_anomalies_with_exit_one() {
    // An unstarred claim below the optimum is an anomaly.
    let f = corpus_file("Cheat,vessel,5800\n");
    let o = pvopt(&["validate", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("below-proven-optimum"));
}

#[test]
fn claim_tolerance_comes_from_the_environment() {
    let f = corpus_file("Close,vessel,6059.5\n");
    let path = f.path().to_str().unwrap();
    assert_eq!(pvopt(&["validate", path]).status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_pvopt"))
        .args(["validate", path])
        .env("PVOPT_CLAIM_TOL", "1.0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn malformed_corpus_exits_two_and_names_the_line() {
    let f = corpus_file("# comment\nOk,vessel,6100\nBroken,vessel,abc\n");
    let o = pvopt(&["validate", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = pvopt(&["validate", "/nonexistent/corpus.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_csv_json_and_output_file() {
    let o = pvopt(&["sweep"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "I,J,d1,d2,feasible,r_opt,L_opt,f_opt");
    assert_eq!(data.len(), 1 + 99 * 99);
    assert!(data.iter().any(|l| l.starts_with("12,7,") && l.contains(",false,")));
    let footer = text.lines().last().unwrap();
    assert!(footer.starts_with("# argmin,13,7,"), "{footer}");
    let f: f64 = footer.rsplit(',').next().unwrap().parse().unwrap();
    assert!(((f - F_MIN) / F_MIN).abs() < 1e-9);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = pvopt(&["sweep", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);

    let j = pvopt(&["sweep", "--format", "json"]);
    let doc = json(&j);
    assert_eq!(doc["argmin"], serde_json::json!([13, 7]));
    assert_eq!(doc["min_objective"].as_f64().unwrap(), f);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 99 * 99);

    let t = pvopt(&["sweep", "--format", "text"]);
    assert!(stdout(&t).lines().last().unwrap().starts_with("argmin I=13 J=7"));
}

#[test]
fn sweep_to_unwritable_path_fails() {
    let o = pvopt(&["sweep", "-o", "/nonexistent/dir/sweep.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot create"));
}

#[test]
fn bench_is_reproducible_in_every_format() {
    let args = ["bench", "vessel", "--seeds", "1..3", "--budget", "3000", "--format", "json"];
    let a = pvopt(&args);
    let b = pvopt(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let doc = json(&a);
    assert_eq!(doc["runs"].as_array().unwrap().len(), 3);
    for run in doc["runs"].as_array().unwrap() {
        if let Some(f) = run["best_feasible_f"].as_f64() {
            assert!(f >= F_MIN - 1e-9);
        }
    }

    let c = pvopt(&["bench", "cantilever", "--algo", "random", "--seeds", "4,5", "--budget", "2000", "--format", "csv"]);
    assert!(c.status.success());
    let csv = stdout(&c);
    assert!(csv.starts_with("seed,algorithm,evaluations,"));
    assert_eq!(csv.lines().count(), 3);

    let t = pvopt(&["bench", "vessel", "--seeds", "1", "--budget", "2000"]);
    assert!(t.status.success());
    assert!(stdout(&t).contains("median gap"));
}

#[test]
fn bench_writes_history() {
    let dir = tempfile::tempdir().unwrap();
    let o = pvopt(&["bench", "vessel", "--seeds", "1,2", "--budget", "1000", "--history", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    for seed in [1, 2] {
        let h = std::fs::read_to_string(dir.path().join(format!("seed-{seed}.csv"))).unwrap();
        assert!(h.starts_with("evaluation_index,best_penalized_f,best_feasible_f"));
    }
}

#[test]
fn bench_rejects_bad_configuration() {
    assert_eq!(pvopt(&["bench", "vessel", "--budget", "0"]).status.code(), Some(2));
    assert_eq!(pvopt(&["bench", "vessel", "--seeds", "5..1"]).status.code(), Some(2));
    assert_eq!(pvopt(&["bench", "vessel", "--cr", "1.5"]).status.code(), Some(2));
}
