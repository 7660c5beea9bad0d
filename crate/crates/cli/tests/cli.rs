use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ballistic"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .env_remove("BALLISTIC_SEED")
        .output()
        .unwrap()
}

#[test]
fn validate_passes_on_mixed_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["validate"], &scenario("validate_qp.toml"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("validate.json"));
}

#[test]
fn separable_example_fails_checks() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run"], &scenario("validate_separable.toml"), dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("checks failed"));
}

#[test]
fn missing_key_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario("transform_free.toml")).unwrap();
    let broken: String = text.lines().filter(|l| !l.trim_start().starts_with("resolution")).map(|l| format!("{l}\n")).collect();
    let cfg = dir.path().join("broken.toml");
    std::fs::write(&cfg, broken).unwrap();
    let o = run(&["transform"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("resolution") && err.contains("line "), "{err}");
}

#[test]
fn subcommand_must_match_kind() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["transport"], &scenario("validate_qp.toml"), dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("subcommand expects `transport`"));
}

#[test]
fn seed_flag_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["validate", "--seed", "77"], &scenario("validate_qp.toml"), dir.path());
    assert_eq!(o.status.code(), Some(0));
    let manifest = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 77"));
}
