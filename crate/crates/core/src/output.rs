//! CSV and SVG output of sweep records.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::phases::PhaseRecord;
use crate::sweep::SweepRecord;

pub const CSV_HEADER: [&str; 14] = [
    "lambda",
    "r",
    "theta",
    "gamma_int_2site",
    "gamma_int_1site",
    "delta_gamma",
    "delta_gamma_unwrapped",
    "gamma_u_2site",
    "gamma_u_1site",
    "delta_gamma_u",
    "delta_gamma_u_unwrapped",
    "steps",
    "quad_tol",
    "status",
];

/// Columns that can be plotted with [`emit_svg`].
pub const PLOT_COLUMNS: [&str; 8] = [
    "gamma_int_2site",
    "gamma_int_1site",
    "delta_gamma",
    "delta_gamma_unwrapped",
    "gamma_u_2site",
    "gamma_u_1site",
    "delta_gamma_u",
    "delta_gamma_u_unwrapped",
];

/// Twelve significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

fn column(rec: &SweepRecord, name: &str) -> Option<f64> {
    let p = &rec.phases;
    match name {
        "gamma_int_2site" => p.gamma_int_pair,
        "gamma_int_1site" => p.gamma_int_single,
        "delta_gamma" => p.delta_gamma,
        "delta_gamma_unwrapped" => rec.delta_gamma_unwrapped,
        "gamma_u_2site" => p.gamma_u_pair,
        "gamma_u_1site" => p.gamma_u_single,
        "delta_gamma_u" => p.delta_gamma_u,
        "delta_gamma_u_unwrapped" => rec.delta_gamma_u_unwrapped,
        _ => None,
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

/// The CSV text for `records`, header first.
pub fn csv_bytes(records: &[SweepRecord]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for rec in records {
        let p = &rec.phases;
        w.write_record([
            format_real(rec.lambda),
            rec.r.to_string(),
            format_real(rec.theta),
            opt(p.gamma_int_pair),
            opt(p.gamma_int_single),
            opt(p.delta_gamma),
            opt(rec.delta_gamma_unwrapped),
            opt(p.gamma_u_pair),
            opt(p.gamma_u_single),
            opt(p.delta_gamma_u),
            opt(rec.delta_gamma_u_unwrapped),
            p.steps_used.to_string(),
            format_real(rec.quad_tol),
            rec.status.clone(),
        ])
        .map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Csv(e.to_string()))
}

pub fn emit_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    let bytes = csv_bytes(records)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn parse_field<T: std::str::FromStr>(s: &str, name: &str, line: u64) -> Result<T> {
    s.parse().map_err(|_| Error::Csv(format!("line {line}: bad {name} `{s}`")))
}

fn parse_real_field(s: &str, name: &str, line: u64) -> Result<f64> {
    let v: f64 = parse_field(s, name, line)?;
    if v.is_finite() { Ok(v) } else { Err(Error::Csv(format!("line {line}: {name} is not finite"))) }
}

fn parse_opt(s: &str, name: &str, line: u64) -> Result<Option<f64>> {
    if s.is_empty() { Ok(None) } else { parse_real_field(s, name, line).map(Some) }
}

/// Reads text written by [`emit_csv`]. Fields not stored in the file
/// (`detail`, `convergence_estimate`) come back empty.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Csv("unexpected header".into()));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != CSV_HEADER.len() {
            return Err(Error::Csv(format!("line {line}: expected {} fields, found {}", CSV_HEADER.len(), row.len())));
        }
        let f = |i: usize| &row[i];
        let status = f(13).to_string();
        if status.is_empty() || !status.bytes().all(|b| b.is_ascii_lowercase() || b == b'_') {
            return Err(Error::Csv(format!("line {line}: bad status `{status}`")));
        }
        let r: usize = parse_field(f(1), "r", line)?;
        if r == 0 {
            return Err(Error::Csv(format!("line {line}: r must be positive")));
        }
        records.push(SweepRecord {
            lambda: parse_real_field(f(0), "lambda", line)?,
            r,
            theta: parse_real_field(f(2), "theta", line)?,
            phases: PhaseRecord {
                gamma_int_pair: parse_opt(f(3), CSV_HEADER[3], line)?,
                gamma_int_single: parse_opt(f(4), CSV_HEADER[4], line)?,
                delta_gamma: parse_opt(f(5), CSV_HEADER[5], line)?,
                gamma_u_pair: parse_opt(f(7), CSV_HEADER[7], line)?,
                gamma_u_single: parse_opt(f(8), CSV_HEADER[8], line)?,
                delta_gamma_u: parse_opt(f(9), CSV_HEADER[9], line)?,
                steps_used: parse_field(f(11), "steps", line)?,
                convergence_estimate: 0.0,
            },
            delta_gamma_unwrapped: parse_opt(f(6), CSV_HEADER[6], line)?,
            delta_gamma_u_unwrapped: parse_opt(f(10), CSV_HEADER[10], line)?,
            quad_tol: parse_real_field(f(12), "quad_tol", line)?,
            status,
            detail: None,
        });
    }
    Ok(records)
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// SVG document plotting `y_column` against `lambda`, one polyline per
/// `(r, theta)` family in order of first appearance.
pub fn svg_string(records: &[SweepRecord], y_column: &str) -> Result<String> {
    if !PLOT_COLUMNS.contains(&y_column) {
        return Err(Error::InvalidParameter(format!(
            "cannot plot `{y_column}`; choose one of {}",
            PLOT_COLUMNS.join(", ")
        )));
    }
    let mut families: Vec<((usize, u64), Vec<(f64, f64)>)> = Vec::new();
    for rec in records {
        let Some(y) = column(rec, y_column) else { continue };
        let key = (rec.r, rec.theta.to_bits());
        match families.iter_mut().find(|(k, _)| *k == key) {
            Some((_, pts)) => pts.push((rec.lambda, y)),
            None => families.push((key, vec![(rec.lambda, y)])),
        }
    }
    if families.is_empty() {
        return Err(Error::EmptySelection(format!("no defined values in column `{y_column}`")));
    }
    let all = || families.iter().flat_map(|(_, p)| p.iter());
    let (x0, x1) = padded_range(all().map(|p| p.0));
    let (y0, y1) = padded_range(all().map(|p| p.1));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let base = TOP + plot_h;
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{base}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, base + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{xv:.3}</text>"#, base + 20.0);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.3}</text>"#, LEFT - 8.0, py + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">lambda</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(y_column)
    );

    for (i, ((r, theta_bits), pts)) in families.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if pts.len() == 1 {
            let (x, y) = pts[0];
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
        } else {
            let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
        }
        let ly = TOP + 15.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">r = {r}, theta = {:.4}</text>"#,
            lx + 26.0,
            ly + 4.0,
            f64::from_bits(*theta_bits)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(records: &[SweepRecord], path: &Path, y_column: &str) -> Result<()> {
    let svg = svg_string(records, y_column)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
