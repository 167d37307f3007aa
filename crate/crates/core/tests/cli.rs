use std::path::Path;

use ifs_shadow::cli::{run_with_args, EXIT_CONFIG, EXIT_OK, EXIT_VIOLATION};
use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> (i32, Value) {
    let out = dir.join("out.json");
    let mut argv = vec!["ifsshadow".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.extend(["--out".into(), out.display().to_string()]);
    let code = run_with_args(argv);
    let json = std::fs::read_to_string(&out).map(|s| serde_json::from_str(&s).unwrap()).unwrap_or(Value::Null);
    (code, json)
}

#[test]
fn generate_then_shadow_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.csv");
    let shadow = dir.path().join("shadow.csv");
    let c = chain.to_str().unwrap();
    let s = shadow.to_str().unwrap();

    let (code, _) = run(dir.path(), &["generate", "--system", "cat", "--delta", "1e-3", "--len", "200", "--seed", "5", "--csv", c]);
    assert_eq!(code, EXIT_OK);
    let (code, json) = run(dir.path(), &["shadow", "--system", "cat", "--input", c, "--csv", s]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json["ok"], true);
    let (code, json) = run(dir.path(), &["verify", "--system", "cat", "--chain", c, "--shadow", s, "--eps", "0.01", "--trials", "5"]);
    assert_eq!(code, EXIT_OK, "{json}");

    let (code, _) = run(dir.path(), &["verify", "--system", "cat", "--chain", c, "--shadow", s, "--eps", "1e-6"]);
    assert_eq!(code, EXIT_VIOLATION);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, json) = run(dir.path(), &["shadow", "--system", "no-such-system"]);
    assert_eq!(code, EXIT_CONFIG);
    assert_eq!(json["ok"], false);
    assert!(json["error"].is_string());
    assert_eq!(run(dir.path(), &["shadow", "--system", "cat", "--delta=-1"]).0, EXIT_CONFIG);
    assert_eq!(run(dir.path(), &["shadow", "--system", "cat", "--sigma", "constant:3"]).0, EXIT_CONFIG);
}

#[test]
fn contraction_solver_refuses_expanding_system() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(dir.path(), &["shadow", "--system", "cat", "--solver", "contraction", "--len", "50"]);
    assert_ne!(code, EXIT_OK);
}

#[test]
fn ifs_from_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ifs.json");
    std::fs::write(
        &path,
        r#"{
  "space": { "dim": 2, "kind": "cube" },
  "maps": [
    { "kind": "contraction", "params": { "q": 0.3, "offset": [0.0, 0.0] } },
    { "kind": "contraction", "params": { "q": 0.3, "offset": [0.7, 0.7] } }
  ]
}"#,
    )
    .unwrap();
    let (code, json) = run(
        dir.path(),
        &["shadow", "--system", path.to_str().unwrap(), "--sigma", "periodic:0,1", "--delta", "0.01", "--len", "300"],
    );
    assert_eq!(code, EXIT_OK, "{json}");
    assert_eq!(json["result"]["solver"], "contraction");
    let sup = json["result"]["sup_dist"].as_f64().unwrap();
    assert!(sup <= 0.01 / 0.7 + 1e-12, "{sup}");
}

#[test]
fn config_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let (_, json) = run(dir.path(), &["septime", "--system", "cat", "--eta", "0.1", "--mu", "0.001", "--grid", "8", "--n-cap", "30"]);
    assert_eq!(json["config"]["command"], "septime");
    assert_eq!(json["config"]["eta"], 0.1);
}

#[test]
fn cover_writes_counterexamples() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cover.csv");
    let (code, json) = run(
        dir.path(),
        &["cover", "--system", "torus_F1", "--eps", "0.05", "--delta", "0.05", "--centers", "20", "--probes", "100", "--seed", "7", "--csv", csv.to_str().unwrap()],
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("X0,X1,X2,X3,Z0,Z1,Z2,Z3,preimage_dist,epsilon,seed\n"));
    let rows = text.lines().count() - 1;
    // the verdict is a measurement either way
    assert_eq!(code, EXIT_OK);
    assert_eq!(rows == 0, json["result"]["pass"] == true);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",7")));
}
