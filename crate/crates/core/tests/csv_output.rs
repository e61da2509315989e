use std::f64::consts::PI;

use tfim_gp::output::{csv_bytes, emit_csv, format_real, parse_csv, CSV_HEADER};
use tfim_gp::phases::{PhaseKinds, PhaseRecord};
use tfim_gp::sweep::{run_sweep, SweepConfig, SweepRecord};

const HEADER: &str = "lambda,r,theta,gamma_int_2site,gamma_int_1site,delta_gamma,delta_gamma_unwrapped,\
gamma_u_2site,gamma_u_1site,delta_gamma_u,delta_gamma_u_unwrapped,steps,quad_tol,status";

fn ok_record() -> SweepRecord {
    SweepRecord {
        lambda: 0.5,
        r: 2,
        theta: PI / 3.0,
        phases: PhaseRecord {
            gamma_int_pair: Some(-1.234_567_890_123_456),
            gamma_int_single: Some(0.3),
            delta_gamma: Some(-1e-9),
            gamma_u_pair: Some(2.0),
            gamma_u_single: Some(-0.0),
            delta_gamma_u: Some(PI),
            steps_used: 2000,
            convergence_estimate: 1e-4,
        },
        delta_gamma_unwrapped: Some(-1e-9),
        delta_gamma_u_unwrapped: Some(3.0 * PI),
        quad_tol: 1e-10,
        status: "ok".into(),
        detail: None,
    }
}

fn text(records: &[SweepRecord]) -> String {
    String::from_utf8(csv_bytes(records).unwrap()).unwrap()
}

#[test]
fn header_is_exact() {
    assert_eq!(CSV_HEADER.join(","), HEADER);
    assert_eq!(text(&[]), format!("{HEADER}\n"));
}

#[test]
fn one_ok_record() {
    let t = text(&[ok_record()]);
    let lines: Vec<_> = t.lines().collect();
    assert_eq!(lines.len(), 2);
    let fields: Vec<_> = lines[1].split(',').collect();
    assert_eq!(fields.len(), CSV_HEADER.len());
    assert_eq!(fields[0], "5.00000000000e-1");
    assert_eq!(fields[1], "2");
    assert_eq!(fields[3], "-1.23456789012e0");
    assert_eq!(fields[11], "2000");
    assert_eq!(fields[13], "ok");
}

#[test]
fn twelve_significant_digits() {
    for x in [PI, -1e-300, 6.02214076e23, 0.1] {
        let s = format_real(x);
        let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 12, "{s}");
    }
}

#[test]
fn rank_deficient_record_has_empty_phases() {
    let config = SweepConfig {
        lambda_min: 1e-6,
        lambda_max: 1e-6,
        lambda_steps: 1,
        kinds: PhaseKinds::UHLMANN,
        loop_steps: 32,
        ..Default::default()
    };
    let recs = run_sweep(&config).unwrap();
    let t = text(&recs);
    let fields: Vec<_> = t.lines().nth(1).unwrap().split(',').collect();
    assert!(fields[3..=10].iter().all(|f| f.is_empty()), "{fields:?}");
    assert_eq!(fields[13], "rank_deficient");
}

#[test]
fn round_trip_is_bit_identical() {
    let config = SweepConfig {
        lambda_min: 0.01,
        lambda_max: 1.9,
        lambda_steps: 6,
        r_list: vec![1, 4],
        theta_list: vec![PI / 4.0],
        loop_steps: 64,
        ..Default::default()
    };
    let mut recs = run_sweep(&config).unwrap();
    recs.push(ok_record());
    let first = csv_bytes(&recs).unwrap();
    let parsed = parse_csv(std::str::from_utf8(&first).unwrap()).unwrap();
    assert_eq!(parsed.len(), recs.len());
    assert_eq!(csv_bytes(&parsed).unwrap(), first);
    for (a, b) in parsed.iter().zip(&recs) {
        assert_eq!(format_real(a.lambda), format_real(b.lambda));
        assert_eq!(a.status, b.status);
        assert_eq!(a.phases.delta_gamma.map(format_real), b.phases.delta_gamma.map(format_real));
    }
}

#[test]
fn malformed_input_is_rejected() {
    let good = text(&[ok_record()]);
    let row = good.lines().nth(1).unwrap();
    for bad in [
        String::new(),
        "lambda,r\n1,2\n".to_string(),
        format!("{HEADER}\n1,2,3\n"),
        format!("{HEADER}\n{}\n", row.replacen("5.00000000000e-1", "x", 1)),
        format!("{HEADER}\n{}\n", row.replacen(",2,", ",0,", 1)),
        format!("{HEADER}\n{}\n", row.replace(",ok", ",OK!")),
        format!("{HEADER}\n{}\n", row.replacen("5.00000000000e-1", "inf", 1)),
    ] {
        assert!(parse_csv(&bad).is_err(), "{bad}");
    }
}

#[test]
fn emit_reports_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    emit_csv(&[ok_record()], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text(&[ok_record()]));
    let missing = dir.path().join("no/such/dir/out.csv");
    assert_eq!(emit_csv(&[], &missing).unwrap_err().tag(), "io");
}
