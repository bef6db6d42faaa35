use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use whlpa::config::RunConfig;
use whlpa::report::MANIFEST_NAME;

fn whlpa(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_whlpa"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

const SMALL: [&str; 4] = ["--beta", "10", "--slices", "512"];

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for cmd in ["flow", "density", "correlate"] {
        let mut args = vec![cmd, "--preset", "harmonic"];
        args.extend(SMALL);
        assert!(whlpa(&args, a.path()).status.success(), "{cmd}");
        assert!(whlpa(&args, b.path()).status.success(), "{cmd}");
    }
    for file in [
        "flow_trajectory.csv",
        "effective_potential.csv",
        "density.csv",
        "correlator.csv",
    ] {
        let x = fs::read(a.path().join(file)).unwrap();
        let y = fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file} differs between runs");
    }
}

#[test]
fn manifest_reproduces_the_run() {
    let first = tempfile::tempdir().unwrap();
    let mut args = vec![
        "flow",
        "--potential",
        "g2=1,g4=24",
        "--order",
        "6",
        "--compat-omega",
    ];
    args.extend(SMALL);
    let out1 = whlpa(&args, first.path());
    assert!(out1.status.success());
    let manifest = fs::read_to_string(first.path().join(MANIFEST_NAME)).unwrap();
    let cfg = RunConfig::from_kv(&manifest).unwrap();
    assert_eq!(cfg.order, 6);
    assert_eq!(cfg.n_slices, 512);
    assert_eq!(cfg.omega, whlpa::OmegaConvention::Printed);

    // replaying the manifest, redirected elsewhere, gives the same numbers
    let second = tempfile::tempdir().unwrap();
    let manifest_path = first.path().join(MANIFEST_NAME);
    let out2 = whlpa(
        &["flow", "--config", manifest_path.to_str().unwrap()],
        second.path(),
    );
    assert!(out2.status.success());
    assert_eq!(out1.stdout, out2.stdout);
    let cfg2 = RunConfig::from_kv(&fs::read_to_string(second.path().join(MANIFEST_NAME)).unwrap())
        .unwrap();
    assert_eq!(
        RunConfig {
            out_dir: cfg.out_dir.clone(),
            ..cfg2
        },
        cfg
    );
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.cfg");
    fs::write(&file, "preset=harmonic\nbeta=10\nslices=64\norder=4\n").unwrap();
    let out = whlpa(
        &[
            "flow",
            "--config",
            file.to_str().unwrap(),
            "--slices",
            "128",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let cfg =
        RunConfig::from_kv(&fs::read_to_string(dir.path().join(MANIFEST_NAME)).unwrap()).unwrap();
    assert_eq!((cfg.beta, cfg.n_slices, cfg.order), (10.0, 128, 4));
}

#[test]
fn breakdown_exits_with_mode_index() {
    let dir = tempfile::tempdir().unwrap();
    let out = whlpa(
        &[
            "flow",
            "--preset",
            "doublewell2.4",
            "--order",
            "6",
            "--beta",
            "40",
            "--slices",
            "16384",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("breakdown at mode m="), "{err}");
    // the trajectory up to the breakdown is still written
    let traj = fs::read_to_string(dir.path().join("flow_trajectory.csv")).unwrap();
    assert!(traj.lines().count() > 2);
}

#[test]
fn invalid_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = whlpa(
        &["flow", "--preset", "harmonic", "--slices", "63"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("even"));
    let out = whlpa(&["flow", "--preset", "nonsense"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn density_csv_has_all_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = whlpa(
        &[
            "density",
            "--preset",
            "anharmonic240",
            "--grid=-1:1:21",
            "--beta",
            "20",
            "--slices",
            "4096",
            "--oracle-points",
            "1001",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("density.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,rho_rg,rho_var,rho_exact"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 21);
    assert!(rows
        .iter()
        .all(|r| r.len() == 4 && r[1..].iter().all(|v| *v >= 0.0)));
}

#[test]
fn density_keeps_partial_columns_on_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let out = whlpa(
        &[
            "density",
            "--preset",
            "doublewell2.4",
            "--order",
            "6",
            "--beta",
            "40",
            "--slices",
            "4096",
            "--grid=-2:2:5",
            "--oracle-points",
            "801",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning: rg density unavailable"));
    let text = fs::read_to_string(dir.path().join("density.csv")).unwrap();
    for row in text.lines().skip(1) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 4);
        assert!(fields[1].is_empty() && !fields[2].is_empty() && !fields[3].is_empty());
    }
}

#[test]
fn correlate_reports_harmonic_decay() {
    let dir = tempfile::tempdir().unwrap();
    let out = whlpa(&["correlate", "--preset", "harmonic"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let rate: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("decay_rate"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((rate - 1.0).abs() < 0.02, "{rate}");
    let csv = fs::read_to_string(dir.path().join("correlator.csv")).unwrap();
    assert!(csv.starts_with("dt,two_point,thermal_two_point\n"));
}

#[test]
fn table_has_nine_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = whlpa(
        &[
            "table",
            "--preset",
            "anharmonic240",
            "--beta",
            "20",
            "--slices",
            "4096",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1].split_whitespace().count(), 9);
    let csv = fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 9);
}
