use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn relbgk(experiment: &str, config: &str, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relbgk"))
        .arg(experiment)
        .arg("--config")
        .arg(configs().join(config))
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("spawn relbgk")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn passing_run_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = relbgk("validate_bessel", "validate_bessel.toml", dir.path(), &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("\"experiment\": \"validate_bessel\""));
    assert!(report.contains("\"passed\": true"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS bessel_vs_oracle"));
}

#[test]
fn configuration_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 4] = [
        ("validate_bessel", &["--override", "grid.n_energy=1"]),
        ("validate_bessel", &["--override", "grid.bogus=1"]),
        ("relax", &[]),
        ("validate_bessel", &["--override", "constants.c=-1.0"]),
    ];
    for (experiment, extra) in cases {
        let o = relbgk(experiment, "validate_bessel.toml", dir.path(), extra);
        assert_eq!(code(&o), 3, "{experiment} {extra:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = relbgk("relax", "does_not_exist.toml", dir.path(), &[]);
    assert_eq!(code(&o), 3);
}

#[test]
fn n_energy_error_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = relbgk("validate_bessel", "validate_bessel.toml", dir.path(), &["--override", "grid.n_energy=1"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_energy"));
}

#[test]
fn oversized_dt_is_a_cfl_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = relbgk(
        "evolve",
        "evolve.toml",
        dir.path(),
        &["--override", "mesh.n_cells=8", "--override", "solver.dt=1.0"],
    );
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn failed_checks_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    // 10% odd data: the linear heat-flux factor lets entropy dip by ~1e-11.
    let o = relbgk(
        "relax",
        "relax_heat.toml",
        dir.path(),
        &["--override", "experiment.amplitude=0.1", "--override", "solver.t_end=20.0"],
    );
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL entropy_max_relative_drop"));
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("\"passed\": false"));
    assert!(dir.path().join("timeseries.csv").exists());
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--override", "mesh.n_cells=16", "--override", "solver.t_end=0.5"];
    let oa = relbgk("evolve", "evolve.toml", a.path(), &[&args[..], &["--threads", "1"]].concat());
    let ob = relbgk("evolve", "evolve.toml", b.path(), &[&args[..], &["--threads", "3"]].concat());
    assert!(matches!(code(&oa), 0 | 2), "{}", String::from_utf8_lossy(&oa.stderr));
    assert_eq!(code(&oa), code(&ob));
    for file in ["report.json", "timeseries.csv"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert!(x == y, "{file} differs between runs");
    }
}
