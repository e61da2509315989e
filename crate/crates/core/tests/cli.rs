use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfim-gp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn correlators_subcommand() {
    let o = run(&["correlators", "--lambda", "1", "--r", "1,2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("m = 0.636619772367"), "{out}");
    assert_eq!(out.lines().count(), 4);
}

#[test]
fn phase_subcommand_reports_physics_errors_without_failing() {
    let o = run(&["phase", "--lambda", "0.5", "--r", "2", "--theta", "pi/3", "--loop-steps", "64"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("status          = ok"));
    let o = run(&["phase", "--lambda", "1e-6", "--theta", "pi/3", "--kinds", "uhlmann", "--loop-steps", "64"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("rank_deficient"));
}

#[test]
fn sweep_with_config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let csv = dir.path().join("out.csv");
    let svg = dir.path().join("out.svg");
    std::fs::write(
        &cfg,
        format!(
            "# small grid\nlambda_min = 1e-6\nlambda_max = 1.5\nlambda_steps = 4\nr_list = 1, 3\n\
             theta_list = pi/3\nkinds = both\nloop_steps = 32\noutput_path = {}\n",
            dir.path().join("ignored.csv").display()
        ),
    )
    .unwrap();
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        csv.to_str().unwrap(),
        "--lambda-steps",
        "3",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 2);
    assert!(text.contains("rank_deficient"));
    assert!(!dir.path().join("ignored.csv").exists());
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn config_and_io_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.cfg");
    assert!(!run(&["sweep", "--config", missing.to_str().unwrap()]).status.success());
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "lambda_steps = many\n").unwrap();
    assert!(!run(&["sweep", "--config", bad.to_str().unwrap()]).status.success());
    assert!(!run(&["sweep", "--lambda-min", "-1"]).status.success());
    let unwritable = dir.path().join("no/dir/out.csv");
    let o = run(&["sweep", "--lambda-steps", "1", "--kinds", "interferometric", "-o", unwritable.to_str().unwrap()]);
    assert!(!o.status.success());
    let o = run(&["preset", "badname"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("badname"));
}

#[test]
fn preset_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig1.csv");
    let o = run(&["preset", "fig1", "--lambda-steps", "3", "--workers", "2", "-o", csv.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 4);
}

#[test]
fn oracle_report() {
    let o = run(&["oracle", "--lambda", "0.5", "--sites", "8", "--r-max", "2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("lambda = 0.5"));
    assert_eq!(out.lines().filter(|l| l.trim_start().starts_with('8')).count(), 2);
    assert!(!run(&["oracle", "--sites", "7"]).status.success());
}
