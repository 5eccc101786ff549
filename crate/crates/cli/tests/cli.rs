use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dwall(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dwall"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(format!("{name}.toml"));
    std::fs::write(&p, body).unwrap();
    p
}

const WALL: &str = r#"
[geometry]
n = 2
lengths = [6.283185307179586, 6.283185307179586]
cutoffs = [6, 8]
[gauge]
flux = 1
a_minus = [{ component = 0, mode = [0], value = [[0.0, 0.2]] }]
jump = [{ component = 0, mode = [0], value = [[0.0, 0.3]] }]
"#;

#[test]
fn verify_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wall", WALL);
    let out = dir.path().join("out");
    let o = dwall(&["--threads", "2", "verify", cfg.to_str().unwrap()], &out);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{stdout}\n{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout.contains("Index = int P - eta/2 + TA: 1 = "), "{stdout}");
    let json = std::fs::read_to_string(out.join("wall/report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["index"], 1);
    assert_eq!(v["passed"], true);
}

#[test]
fn failing_check_gives_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("{WALL}\n[run]\ntheta_cutoff = 0\n");
    let cfg = write_config(dir.path(), "neg", &body);
    let o = dwall(&["check", "homotopy", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn tolerance_override_reaches_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wall", WALL);
    let out = dir.path().join("out");
    let o = dwall(&["--tolerance", "0.001", "verify", cfg.to_str().unwrap()], &out);
    assert!(o.status.success());
    let json = std::fs::read_to_string(out.join("wall/report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["tolerance"], 0.001);
}

#[test]
fn sweep_delta_reports_constant_index() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wall", WALL);
    let o = dwall(&["sweep-delta", cfg.to_str().unwrap(), "--deltas", "0.2,0.5,1.0"], &dir.path().join("out"));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{stdout}");
    assert_eq!(stdout.matches("index 1").count(), 4, "{stdout}");
    assert!(stdout.contains("PASS"));
}

#[test]
fn structural_check_runs_without_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = dwall(&["check", "structural"], &dir.path().join("out"));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{stdout}");
    assert!(stdout.contains("transgression ch2"));
}

#[test]
fn export_operator_dump_is_readable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wall", WALL);
    let path = dir.path().join("bulk.op");
    let o = dwall(
        &["export-operator", cfg.to_str().unwrap(), "--output", path.to_str().unwrap()],
        &dir.path().join("out"),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    // the flux bundle is expanded in Landau levels: 13 + 12 chirality-split levels
    assert!(stdout.contains("(25 x 25)"), "{stdout}");
    let m = dwall_core::dirac::read_dump(&path).unwrap();
    assert_eq!(m.nrows(), 25);
    assert!((&m - m.adjoint()).norm() < 1e-12);

    let wall = dir.path().join("wall.op");
    let o = dwall(
        &["export-operator", cfg.to_str().unwrap(), "--wall", "0.5", "--output", wall.to_str().unwrap()],
        &dir.path().join("out"),
    );
    assert!(o.status.success());
    assert_eq!(dwall_core::dirac::read_dump(&wall).unwrap().nrows(), 13);
}

#[test]
fn bad_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = dwall(&["verify", "/nonexistent.toml"], &out);
    assert_eq!(o.status.code(), Some(2));
    let o = dwall(&["check", "cylinder"], &out);
    assert_eq!(o.status.code(), Some(2));
    let o = dwall(&["check", "bogus"], &out);
    assert_eq!(o.status.code(), Some(2));
}
