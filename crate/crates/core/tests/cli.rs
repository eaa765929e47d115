use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uncertainty"))
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn assert_schema(name: &str, doc: &str) -> Value {
    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(crate_dir().join(format!("schemas/{name}.schema.json"))).unwrap(),
    )
    .unwrap();
    let v: Value = serde_json::from_str(doc).unwrap_or_else(|e| panic!("{name} output is not JSON: {e}\n{doc}"));
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name} output violates its schema: {errors:?}");
    v
}

fn data(name: &str) -> String {
    crate_dir().join("data").join(name).display().to_string()
}

#[test]
fn constant_known_and_unknown() {
    let (code, out, _) = run(&["constant", "--alpha", "2", "--beta", "1", "--dim", "1"]);
    assert_eq!(code, 0);
    let v = assert_schema("constant", &out);
    let c = v["value"].as_f64().unwrap();
    assert!((c - 8.44343e-3).abs() < 1e-8);

    let (code, out, _) = run(&["constant", "--alpha", "1", "--beta", "3", "--dim", "1"]);
    assert_eq!(code, 2);
    let v = assert_schema("constant", &out);
    assert!(v["value"].is_null());
    assert_eq!(v["source"], "Unknown");

    let (code, out, _) = run(&["constant", "--alpha", "2", "--beta", "0.5", "--dim", "3"]);
    assert_eq!(code, 0);
    let v = assert_schema("constant", &out);
    let l = v["lambda_beta"].as_f64().unwrap();
    assert!((l - 0.185_504_824_101_775_8).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["constant", "--alpha", "-1", "--beta", "1", "--dim", "1"]).0, 1);
    assert_eq!(run(&["constant", "--alpha", "2", "--beta", "1"]).0, 1);
    assert_eq!(run(&["no-such-command"]).0, 1);
    assert_eq!(run(&["lambda", "--beta", "1.5"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn lambda_grid() {
    let (code, out, _) = run(&["lambda", "--beta", "1,0.5,0.1"]);
    assert_eq!(code, 0);
    let v = assert_schema("lambda", &out);
    let e = v["entries"].as_array().unwrap();
    assert_eq!(e[0]["lambda"].as_f64().unwrap(), 0.25);
    assert!(e.iter().all(|x| x["bounds_hold"] == true));
}

#[test]
fn verify_bundled_certificates() {
    let (code, out, _) =
        run(&["verify", "--cert", &data("psi2.cert.json"), "--measure", &data("triangle.measure.json"), "--beta", "2"]);
    assert_eq!(code, 0, "{out}");
    let v = assert_schema("verify", &out);
    assert_eq!(v["passed"], true);

    let (code, out, err) =
        run(&["verify", "--cert", &data("psi2.cert.json"), "--measure", &data("box.measure.json"), "--beta", "2"]);
    assert_eq!(code, 4);
    assert!(err.contains("failed conditions"));
    assert_eq!(assert_schema("verify", &out)["passed"], false);

    let (code, out, _) = run(&[
        "verify",
        "--cert",
        &data("psi5.cert.json"),
        "--measure",
        &data("triangle.measure.json"),
        "--beta",
        "2",
        "--positive-fourier",
    ]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn corrupted_json_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cert.json");
    std::fs::write(&bad, "{\"dim\": 1, \"terms\": [").unwrap();
    let (code, _, _) =
        run(&["verify", "--cert", bad.to_str().unwrap(), "--measure", &data("triangle.measure.json"), "--beta", "2"]);
    assert_eq!(code, 1);
}

#[test]
fn trig_certifies() {
    let (code, out, _) = run(&["trig"]);
    assert_eq!(code, 0);
    let v = assert_schema("trig", &out);
    for k in ["tan_upper", "tan_lower", "g_beta1_all", "g_general_all", "all_certified"] {
        assert_eq!(v[k], true, "{k}");
    }
}

#[test]
fn demo_signed_csv_and_json() {
    let (code, out, _) = run(&["demo-signed", "--modes", "1", "--trials", "4"]);
    assert_eq!(code, 0);
    let ratios: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(ratios.len(), 4);
    assert!(ratios.iter().all(|r| r == &ratios[0]), "one mode has no randomness");

    let (code, out, _) = run(&["--format", "json", "demo-signed", "--modes", "2,8", "--trials", "3"]);
    assert_eq!(code, 0);
    assert_eq!(assert_schema("demo-signed", &out).as_array().unwrap().len(), 2);
}

#[test]
fn fourier_csv() {
    let (code, out, _) = run(&["fourier", "--exemplar", "box", "--beta", "1", "--window", "2", "--points", "4"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,fourier,weighted");
    assert_eq!(lines.len(), 6);
    // box transform vanishes at integers
    let at1: Vec<f64> = lines[3].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(at1[0], 1.0);
    assert!(at1[1].abs() < 1e-15);
    assert_eq!(run(&["fourier", "--beta", "1"]).0, 1);
}

fn solve_bundle(dir: &Path, extra: &[&str]) -> Value {
    let mut args = vec!["--output-dir", dir.to_str().unwrap(), "solve"];
    args.extend_from_slice(extra);
    let (code, out, err) = run(&args);
    assert_eq!(code, 0, "{err}");
    assert_schema("solve", &out)
}

#[test]
fn solve_writes_bundle_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let v = solve_bundle(dir.path(), &["--alpha", "2", "--beta", "0.5", "--dim", "3"]);
    assert!(v["rel_err"].as_f64().unwrap() < 0.02);
    assert_eq!(v["diagnostics"]["structure"]["cluster_count"], 1);
    for f in
        ["solution.json", "certificate.json", "instance.json", "masses.csv", "spectrum.csv", "solve.json", "solve.log"]
    {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let first = std::fs::read(dir.path().join("solve.json")).unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    solve_bundle(dir2.path(), &["--alpha", "2", "--beta", "0.5", "--dim", "3"]);
    assert_eq!(first, std::fs::read(dir2.path().join("solve.json")).unwrap());

    // the written certificate verifies through the CLI as a finite certificate
    let cert = dir.path().join("certificate.json");
    let c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c["family"], "FromLP");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small run\nalpha = 2\nbeta=1\ndim = 1\nn_radii = 101\nmax-cut-rounds = 1\n").unwrap();
    let (code, out, _) = run(&["--config", cfg.to_str().unwrap(), "solve"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["cut_rounds"].as_u64().unwrap() <= 1);
    let (code, out, _) = run(&["--config", cfg.to_str().unwrap(), "solve", "--max-cut-rounds", "0", "--alpha", "3"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["cut_rounds"], 0);
    assert_eq!(v["triple"]["alpha"].as_f64(), Some(3.0));

    std::fs::write(&cfg, "alpha 2\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "solve"]).0, 1);
}

#[test]
fn solve_csv_lists_masses() {
    let (code, out, _) =
        run(&["--format", "csv", "solve", "--alpha", "2", "--beta", "1", "--dim", "3", "--n-radii", "51"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("radius,mass"));
    assert_eq!(out.lines().count(), 52);
}
