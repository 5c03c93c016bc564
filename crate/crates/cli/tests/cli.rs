use std::path::Path;
use std::process::{Command, Output};

use spinepr_cli::SWEEP_HEADER;

fn spinepr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinepr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn with_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn sweep_to_stdout_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_config(dir.path(), "z_steps = 12\ngamma_d_add_list = 0, 2\n");
    let a = spinepr(&["sweep", "--config", &cfg]);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    let text = stdout(&a);
    assert_eq!(text.lines().next(), Some(SWEEP_HEADER));
    assert_eq!(text.lines().count(), 1 + 24);
    assert!(String::from_utf8_lossy(&a.stderr).contains("min E_epr_inf"));
    let b = spinepr(&["sweep", "--config", &cfg]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn empty_table_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.csv");
    spinepr_cli::emit_csv(&[], &out).unwrap();
    assert_eq!(
        std::fs::read_to_string(out).unwrap(),
        format!("{SWEEP_HEADER}\n")
    );

    let cfg = with_config(dir.path(), "z_steps = 0\n");
    assert_eq!(spinepr(&["sweep", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_config(dir.path(), "z_min = 3\nz_max = 2\n");
    let run = spinepr(&["sweep", "--config", &cfg]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("z_min"));
    assert!(run.stdout.is_empty());

    let cfg = with_config(dir.path(), "bogus = 1\n");
    assert_eq!(
        spinepr(&["steady", "--config", &cfg]).status.code(),
        Some(1)
    );
    assert_eq!(
        spinepr(&["sweep", "--config", "/nonexistent/run.cfg"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(spinepr(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        spinepr(&["causality", "--delta-t-ms", "-1"]).status.code(),
        Some(1)
    );

    let cfg = with_config(dir.path(), "mc_m = 1000\n");
    assert_eq!(spinepr(&["sweep", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn numerical_and_io_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_config(dir.path(), "pop = fixed\np2_fixed = 0\n");
    assert_eq!(
        spinepr(&["steady", "--config", &cfg]).status.code(),
        Some(2)
    );
    let run = spinepr(&["sweep", "--output", "/nonexistent/dir/out.csv"]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn help_exits_cleanly() {
    let run = spinepr(&["--help"]);
    assert_eq!(run.status.code(), Some(0));
    assert!(stdout(&run).contains("sweep"));
}

#[test]
fn steady_reports_the_reference_point() {
    let run = spinepr(&["steady"]);
    assert_eq!(run.status.code(), Some(0));
    let text = stdout(&run);
    assert!(text.contains("g_z = 0.607864244\n"), "{text}");
    assert!(text.contains("E_epr_ab = 1.33981476\n"));
    assert!(text.contains("entangled = true\n"));
}

#[test]
fn causality_prints_meters() {
    let run = spinepr(&["causality", "--delta-t-ms", "0.45"]);
    assert_eq!(run.status.code(), Some(0));
    let d: f64 = stdout(&run).trim().parse().unwrap();
    assert!((d - 1.349e5).abs() < 100.0);
}

#[test]
fn dynamics_ends_at_the_steady_state() {
    let run = spinepr(&["dynamics"]);
    assert_eq!(run.status.code(), Some(0));
    let text = stdout(&run);
    assert!(text.starts_with("t,v_az,v_ay,v_bz,v_by,c_zz,c_yy,p2\n"));
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((last[5] - 151_966.061).abs() < 0.01, "{last:?}");
}

#[test]
fn monte_carlo_sweep_writes_companion_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_config(
        dir.path(),
        "z_steps = 3\ngamma_d_add_list = 0\nmc_m = 1000\nmc_seed = 4\n",
    );
    let out = dir.path().join("s.csv");
    let run = spinepr(&["sweep", "-c", &cfg, "-o", out.to_str().unwrap()]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let mc = std::fs::read_to_string(dir.path().join("s.csv.mc.csv")).unwrap();
    assert_eq!(mc.lines().count(), 4);
}
