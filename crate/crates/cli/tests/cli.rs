use std::fs;

use dadmm_cli::{cli_main, EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME};

fn run(args: &[&str]) -> i32 {
    cli_main(std::iter::once("dadmm").chain(args.iter().copied()))
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

const CONFIG: &str = r#"
[network]
model = "lattice"
nodes = 10

[problem]
family = "consensus"

[run]
algorithms = ["d-admm", "zhu"]
rho = [0.1, 1.0]
"#;

#[test]
fn missing_config_is_a_configuration_error() {
    assert_eq!(run(&["run", "/nonexistent/experiment.toml"]), EXIT_CONFIG);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(run(&["suite", "figure2", "--nodes", "10", "--bogus"]), EXIT_CONFIG);
    assert_eq!(run(&["frobnicate"]), EXIT_CONFIG);
    assert_eq!(run(&["--help"]), EXIT_OK);
}

#[test]
fn suite_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "fig2");
    assert_eq!(run(&["suite", "figure2", "--nodes", "10", "--out-dir", &out]), EXIT_OK);
    let summary = fs::read_to_string(dir.path().join("fig2/summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some("network,algorithm,rho,steps,final_rel_error,messages"));
    assert_eq!(lines.count(), 7 * 4 * 7);
    let table = fs::read_to_string(dir.path().join("fig2/figure2.csv")).unwrap();
    assert!(table.lines().any(|l| l.starts_with("7,7-lattice,schizas,")));
}

#[test]
fn suite_repeats_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "rep");
    let code = run(&["suite", "figure2", "--nodes", "10", "--out-dir", &out, "--seeds", "2", "--seed", "5", "--max-steps", "50"]);
    assert_eq!(code, EXIT_OK);
    assert!(dir.path().join("rep/seed5/summary.csv").exists());
    assert!(dir.path().join("rep/seed6/summary.csv").exists());
}

#[test]
fn gen_network_lattice_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "lattice.txt");
    assert_eq!(run(&["gen-network", "lattice", "--nodes", "10", "--out", &out]), EXIT_OK);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("10 13"));
    assert_eq!(text.lines().count(), 14);
}

#[test]
fn gen_network_rejects_bad_parameters() {
    assert_eq!(run(&["gen-network", "torus", "--nodes", "10"]), EXIT_CONFIG);
    assert_eq!(run(&["gen-network", "lattice", "--nodes", "10", "--p", "0.5"]), EXIT_CONFIG);
    assert_eq!(run(&["gen-network", "erdos-renyi", "--nodes", "10", "--p", "1.5"]), EXIT_CONFIG);
}

#[test]
fn run_with_overrides_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(&dir, "exp.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let (a, b) = (path(&dir, "a"), path(&dir, "b"));
    assert_eq!(run(&["run", &cfg, "--out-dir", &a, "--seed", "3", "--tol", "1e-6"]), EXIT_OK);
    assert_eq!(run(&["run", &cfg, "--out-dir", &b, "--seed", "3", "--tol", "1e-6"]), EXIT_OK);
    let sa = fs::read(dir.path().join("a/summary.csv")).unwrap();
    let sb = fs::read(dir.path().join("b/summary.csv")).unwrap();
    assert_eq!(sa, sb);
    assert!(dir.path().join("a/lattice_d-admm_rho1e-1.csv").exists());
}

#[test]
fn run_rejects_bad_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(&dir, "exp.toml");
    fs::write(&cfg, CONFIG).unwrap();
    assert_eq!(run(&["run", &cfg, "--tol", "3"]), EXIT_CONFIG);
    assert_eq!(run(&["run", &cfg, "--max-steps", "0"]), EXIT_CONFIG);
    fs::write(&cfg, CONFIG.replace("[\"d-admm\", \"zhu\"]", "[]")).unwrap();
    assert_eq!(run(&["run", &cfg, "--out-dir", &path(&dir, "x")]), EXIT_CONFIG);
}

#[test]
fn instance_round_trip_and_reference() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(&dir, "consensus.txt");
    let out = path(&dir, "ref.txt");
    assert_eq!(run(&["gen-instance", "consensus", "--nodes", "4", "--seed", "2", "--out", &inst]), EXIT_OK);
    assert_eq!(run(&["solve-reference", &inst, "--out", &out]), EXIT_OK);
    let text = fs::read_to_string(&inst).unwrap();
    let theta: Vec<f64> = text
        .lines()
        .skip_while(|l| !l.starts_with("vector"))
        .nth(1)
        .unwrap()
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    let mean = theta.iter().sum::<f64>() / theta.len() as f64;
    let got: f64 = fs::read_to_string(&out).unwrap().trim().parse().unwrap();
    assert!((got - mean).abs() <= 1e-12 * mean.abs().max(1.0));
}

#[test]
fn malformed_instance_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(&dir, "bad.txt");
    fs::write(&inst, "instance consensus\nnodes two\n").unwrap();
    assert_eq!(run(&["solve-reference", &inst]), EXIT_CONFIG);
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = path(&dir, "file");
    fs::write(&blocker, "x").unwrap();
    let out = format!("{blocker}/sub/graph.txt");
    assert_eq!(run(&["gen-network", "lattice", "--nodes", "10", "--out", &out]), EXIT_RUNTIME);
}
