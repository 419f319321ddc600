use std::fs;
use std::path::Path;
use std::process::Command;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use sheppard_core::io::moments_to_json;
use sheppard_core::verify::{random_sequence, random_width};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn sheppard(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_sheppard")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(run: &Run) -> Value {
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    serde_json::from_str(&run.stdout).expect("JSON output")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn strings(v: &Value) -> Vec<&str> {
    v.as_array().unwrap().iter().map(|x| x.as_str().expect("exact values are strings")).collect()
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).unwrap()
}

#[test]
fn bernoulli_table() {
    let out = json(&sheppard(&["bernoulli", "--order", "12", "--json"]));
    let b = strings(&out["bernoulli"]);
    let c = strings(&out["sheppard"]);
    assert_eq!(b[2], "1/6");
    assert_eq!(c[2], "-1/12");
    assert_eq!(b[12], "-691/2730");
    let zero = json(&sheppard(&["bernoulli", "--order", "0", "--json"]));
    assert_eq!(strings(&zero["bernoulli"]), ["1/1"]);
    assert_eq!(strings(&zero["sheppard"]), ["1/1"]);

    let text = sheppard(&["bernoulli", "--order", "2"]);
    assert_eq!(text.code, 0);
    assert!(text.stdout.lines().any(|l| l == "2\t1/6\t-1/12"));
    assert_eq!(sheppard(&["bernoulli", "--order", "-1"]).code, 1);
}

#[test]
fn correct_and_uncorrect_examples() {
    let dir = tempfile::tempdir().unwrap();
    let grouped = write(dir.path(), "g.json", r#"["1", "0", "1"]"#);
    let out = json(&sheppard(&["correct", "--input", &grouped, "--h", "1"]));
    assert_eq!(strings(&out["moments"]), ["1/1", "0/1", "11/12"]);
    assert_eq!(out["formula"], "Sh1");
    assert_eq!(out["direction"], "to_raw");
    assert_eq!(out["axes"][0]["h"], "1/1");

    let out = json(&sheppard(&["correct", "--input", &grouped, "--h", "1", "--m", "1"]));
    assert_eq!(strings(&out["moments"]), ["1/1", "0/1", "1/1"]);
    assert_eq!(out["formula"], "grdis");

    let raw = write(dir.path(), "r.json", r#"["1", "0", "1/6"]"#);
    let out = json(&sheppard(&["uncorrect", "--input", &raw, "--h", "1"]));
    assert_eq!(strings(&out["moments"]), ["1/1", "0/1", "1/4"]);
    assert_eq!(out["formula"], "Sh3");
    let out = json(&sheppard(&["uncorrect", "--input", &raw, "--h", "1", "--m", "2"]));
    assert_eq!(out["formula"], "shcdis");
    // a₂ + h²(m²−1)/(12m²) = 1/6 + 1/16
    assert_eq!(strings(&out["moments"])[2], "11/48");
}

#[test]
fn histogram_input() {
    let dir = tempfile::tempdir().unwrap();
    let hist = write(dir.path(), "h.csv", "midpoint,frequency\n-0.5,0.5\n0.5,0.5\n");
    let run = sheppard(&["correct", "--histogram", &hist, "--order", "2"]);
    let out = json(&run);
    assert_eq!(strings(&out["grouped"]), ["1/1", "0/1", "1/4"]);
    assert_eq!(strings(&out["moments"]), ["1/1", "0/1", "1/6"]);
    assert_eq!(out["axes"][0]["h"], "1/1");
    assert_eq!(out["source"]["kind"], "histogram");
    assert!(run.stderr.contains("frequency-based"));
    assert!(!run.stderr.contains("normalized as counts"));

    let counts = write(dir.path(), "c.csv", "-0.5,10\n0.5,10\n");
    let run = sheppard(&["correct", "--histogram", &counts, "--order", "2", "--h", "1"]);
    assert_eq!(strings(&json(&run)["moments"])[2], "1/6");
    assert!(run.stderr.contains("normalized as counts"));

    assert_eq!(sheppard(&["correct", "--histogram", &hist, "--h", "2"]).code, 1);
    assert_eq!(sheppard(&["uncorrect", "--histogram", &hist]).code, 1);
    let uneven = write(dir.path(), "u.csv", "0,0.5\n1,0.25\n3,0.25\n");
    assert_eq!(sheppard(&["correct", "--histogram", &uneven]).code, 1);
}

#[test]
fn exact_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (i, m) in ["c", "1", "2", "3", "5", "8"].iter().enumerate() {
        let seq = random_sequence(&mut rng, 10);
        let h = sheppard_core::scalar::format_rational(&random_width(&mut rng));
        let payload = pretty(&moments_to_json(&seq).unwrap());
        let input = write(dir.path(), &format!("in{i}.json"), &payload);
        let mid = dir.path().join(format!("mid{i}.json"));
        let back = dir.path().join(format!("back{i}.json"));
        let mid = mid.to_str().unwrap();
        let back = back.to_str().unwrap();
        assert_eq!(sheppard(&["correct", "--input", &input, "--h", &h, "--m", m, "--output", mid]).code, 0);
        // the output document is itself valid input
        assert_eq!(sheppard(&["uncorrect", "--input", mid, "--h", &h, "--m", m, "--output", back]).code, 0);
        let out: Value = serde_json::from_str(&fs::read_to_string(back).unwrap()).unwrap();
        assert_eq!(pretty(&out["moments"]), payload, "m={m}");
    }
}

#[test]
fn tensor_round_trip_and_formulas() {
    let dir = tempfile::tempdir().unwrap();
    let tensor = r#"{"dims": 2, "max_orders": [2, 1], "values": [
        {"index": [0, 0], "value": "1"}, {"index": [0, 1], "value": "1/3"},
        {"index": [1, 0], "value": "-2/5"}, {"index": [1, 1], "value": "7/4"},
        {"index": [2, 0], "value": "3"}, {"index": [2, 1], "value": "1/9"}]}"#;
    let input = write(dir.path(), "t.json", tensor);
    let mid = dir.path().join("mid.json");
    let mid = mid.to_str().unwrap();
    let run = sheppard(&["uncorrect", "--input", &input, "--h", "1/2", "--h", "3", "--m", "c", "--m", "4", "--output", mid]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let first: Value = serde_json::from_str(&fs::read_to_string(mid).unwrap()).unwrap();
    assert_eq!(first["kind"], "tensor");
    assert_eq!(first["formula"], "v");
    let back = json(&sheppard(&["correct", "--input", mid, "--h", "1/2", "--h", "3", "--m", "c", "--m", "4"]));
    assert_eq!(back["formula"], "iv");
    let original: Value = serde_json::from_str(tensor).unwrap();
    let canonical = sheppard_core::io::tensor_to_json(&sheppard_core::io::tensor_from_json::<sheppard_core::Rational>(&original).unwrap()).unwrap();
    assert_eq!(pretty(&back["tensor"]), pretty(&canonical));

    let cont = json(&sheppard(&["correct", "--input", &input, "--h", "1"]));
    assert_eq!(cont["formula"], "shcmul2");
    let cont = json(&sheppard(&["uncorrect", "--input", &input, "--h", "1"]));
    assert_eq!(cont["formula"], "shcmul");

    assert_eq!(sheppard(&["correct", "--input", &input, "--h", "1", "--h", "2", "--h", "3"]).code, 1);
    assert_eq!(sheppard(&["correct", "--input", &input]).code, 1);
    let cut = json(&sheppard(&["correct", "--input", &input, "--h", "1", "--order", "1"]));
    assert_eq!(cut["tensor"]["max_orders"], serde_json::json!([1, 1]));
    assert_eq!(sheppard(&["correct", "--input", &input, "--h", "1", "--order", "3"]).code, 1);
}

#[test]
fn exact_and_float_outputs_never_mix() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.json", r#"["1", "1/3", "2", "-1/7", "5"]"#);
    let exact = json(&sheppard(&["correct", "--input", &input, "--h", "0.3", "--m", "3"]));
    assert!(exact["moments"].as_array().unwrap().iter().all(|v| v.as_str().is_some_and(|s| s.contains('/'))));
    assert!(exact["axes"][0]["h"].as_str().is_some_and(|s| s == "3/10"));

    let float = json(&sheppard(&["correct", "--input", &input, "--h", "0.3", "--m", "3", "--mode", "float"]));
    assert!(float["moments"].as_array().unwrap().iter().all(Value::is_f64));
    assert!(float["axes"][0]["h"].is_f64());
    for (e, f) in strings(&exact["moments"]).iter().zip(float["moments"].as_array().unwrap()) {
        let e: f64 = {
            let (p, q) = e.split_once('/').unwrap();
            p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap()
        };
        assert!((e - f.as_f64().unwrap()).abs() < 1e-12);
    }

    let floats = write(dir.path(), "f.json", "[1, 0, 0.25]");
    let run = sheppard(&["correct", "--input", &floats, "--h", "1"]);
    assert_eq!(run.code, 1);
    assert!(run.stderr.contains("exact mode"));
    assert_eq!(sheppard(&["correct", "--input", &floats, "--h", "1", "--mode", "float"]).code, 0);
}

#[test]
fn invalid_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let not_unital = write(dir.path(), "n.json", r#"["2", "0"]"#);
    assert_eq!(sheppard(&["correct", "--input", &not_unital, "--h", "1"]).code, 1);
    let ok = write(dir.path(), "ok.json", r#"["1", "0"]"#);
    assert_eq!(sheppard(&["correct", "--input", &ok, "--h", "0"]).code, 1);
    assert_eq!(sheppard(&["correct", "--input", &ok, "--h", "1", "--m", "0"]).code, 1);
    assert_eq!(sheppard(&["correct", "--input", &ok, "--h", "1", "--m", "x"]).code, 1);
    assert_eq!(sheppard(&["correct", "--input", &ok, "--h", "1", "--order", "5"]).code, 1);
    assert_eq!(sheppard(&["correct", "--input", "/nonexistent/file.json", "--h", "1"]).code, 1);
    assert_eq!(sheppard(&["no-such-command"]).code, 1);
    assert_eq!(sheppard(&["correct"]).code, 1);
    assert_eq!(sheppard(&["--help"]).code, 0);
    assert_eq!(sheppard(&["--version"]).code, 0);
}

#[test]
fn oracle_command() {
    let dir = tempfile::tempdir().unwrap();
    let lattice = write(dir.path(), "l.json", r#"{"h": "1", "m": 2, "support": [-1, 0, 1], "probs": ["1/4", "1/2", "1/4"]}"#);
    let out = json(&sheppard(&["oracle", "--lattice", &lattice, "--order", "2"]));
    assert_eq!(strings(&out["raw"]), ["1/1", "0/1", "1/8"]);
    assert_eq!(strings(&out["grouped"]), ["1/1", "0/1", "3/16"]);

    // grouped output fed to correct reproduces raw
    let grouped = write(dir.path(), "g.json", &pretty(&out["grouped"]));
    let fixed = json(&sheppard(&["correct", "--input", &grouped, "--h", "1", "--m", "2"]));
    assert_eq!(fixed["moments"], out["raw"]);

    let joint = write(dir.path(), "j.csv", "s1,s2,prob\n0,0,1/2\n1,1,1/4\n1,-1,1/4\n");
    let out = json(&sheppard(&["oracle", "--joint", &joint, "--h", "1", "--m", "2", "--m", "3", "--order", "3"]));
    assert_eq!(out["kind"], "tensor");
    let raw = write(dir.path(), "jr.json", &pretty(&out["raw"]));
    let predicted = json(&sheppard(&["uncorrect", "--input", &raw, "--h", "1", "--m", "2", "--m", "3"]));
    assert_eq!(predicted["tensor"], out["grouped"]);
}

#[test]
fn moments_command_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let text: String = (0..100).map(|i| format!("{}\n", (i as f64 * 0.37).sin())).collect();
    let samples = write(dir.path(), "s.txt", &text);
    let args = ["moments", "--samples", samples.as_str(), "--h", "0.25", "--trials", "200", "--seed", "9"];
    let a = sheppard(&args);
    let b = sheppard(&args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let out = json(&a);
    assert_eq!(out["count"], 100);
    assert_eq!(out["grouped"]["trials"], 200);
    assert_eq!(out["grouped"]["std_error"].as_array().unwrap().len(), 5);
}

#[test]
fn verify_exit_codes_and_report() {
    let run = sheppard(&["verify", "bernoulli"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 4);

    let first = sheppard(&["verify", "oracle-discrete", "--seed", "42", "--json"]);
    let second = sheppard(&["verify", "oracle-discrete", "--seed", "42", "--json", "--sequential"]);
    assert_eq!(first.code, 0);
    assert_eq!(first.stdout, second.stdout);
    let report: Value = serde_json::from_str(&first.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["checks"][0]["residual"]["kind"], "exact");

    let run = sheppard(&["verify", "oracle-continuous"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("numeric"));

    // no quadrature meets an absurd tolerance
    assert_eq!(sheppard(&["verify", "oracle-continuous", "--tol", "1e-30"]).code, 2);
    assert_eq!(sheppard(&["verify", "nonsense"]).code, 1);
    assert_eq!(sheppard(&["verify", "limit", "--tol", "-1"]).code, 1);
}
