//! Artifact rendering: CSV tables, JSON documents and SVG plots.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use barbalat_core::DecayCertificate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Structured,
    Svg,
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// CSV with a fixed header and `{:.16e}` cells.
pub fn csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = format!("{header}\n");
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

const W: f64 = 720.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;

/// Two series over a shared `t` axis. Non-finite points break the line.
pub fn svg_plot(title: &str, t: &[f64], series: &[(&str, &str, &[f64])]) -> String {
    let finite = |v: &&f64| v.is_finite();
    let t_lo = t.iter().copied().fold(f64::INFINITY, f64::min);
    let t_hi = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ys = series.iter().flat_map(|s| s.2.iter().filter(finite));
    let (mut y_lo, mut y_hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    if !(y_lo.is_finite()) {
        (y_lo, y_hi) = (0.0, 1.0);
    }
    y_lo = y_lo.min(0.0);
    if y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }
    let t_span = if t_hi > t_lo { t_hi - t_lo } else { 1.0 };
    let x = |v: f64| PAD + (v - t_lo) / t_span * (W - 2.0 * PAD);
    let y = |v: f64| H - PAD - (v - y_lo) / (y_hi - y_lo) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    // axes
    let (x0, x1, y0, y1) = (PAD, W - PAD, H - PAD, PAD);
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1">"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
    let _ = writeln!(s, "</g>");
    for k in 0..=4 {
        let tv = t_lo + t_span * k as f64 / 4.0;
        let yv = y_lo + (y_hi - y_lo) * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, x(tv), y0 + 16.0, tick(tv));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 4.0, y(yv) + 4.0, tick(yv));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#, W / 2.0, H - 12.0);
    for (i, (name, color, values)) in series.iter().enumerate() {
        let mut runs: Vec<Vec<String>> = vec![Vec::new()];
        for (&tv, &v) in t.iter().zip(values.iter()) {
            if v.is_finite() {
                runs.last_mut().expect("nonempty").push(format!("{:.2},{:.2}", x(tv), y(v)));
            } else if !runs.last().expect("nonempty").is_empty() {
                runs.push(Vec::new());
            }
        }
        for run in runs.iter().filter(|r| !r.is_empty()) {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                run.join(" ")
            );
        }
        let ly = PAD + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly}" x2="{:.2}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            W - PAD - 110.0,
            W - PAD - 90.0,
            W - PAD - 84.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{}", (v * 1000.0).round() / 1000.0)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn certificate_svg(cert: &DecayCertificate) -> String {
    let t: Vec<f64> = cert.grid.iter().map(|r| r.t).collect();
    let f: Vec<f64> = cert.grid.iter().map(|r| r.f_abs).collect();
    let b: Vec<f64> = cert.grid.iter().map(|r| r.bound).collect();
    svg_plot(
        &format!("{} certificate", cert.method.name()),
        &t,
        &[("|f(t)|", "#1f77b4", &f), ("bound", "#d62728", &b)],
    )
}

pub fn certificate(cert: &DecayCertificate, format: Format) -> String {
    match format {
        Format::Csv => cert.to_csv(),
        Format::Structured => json(cert),
        Format::Svg => certificate_svg(cert),
    }
}

/// A row of a certificate CSV as read back by `check`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub t: f64,
    pub f_abs: f64,
    pub s_value: f64,
    pub bound: f64,
    pub satisfied: bool,
}

pub fn parse_certificate_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    let header = lines.next().context("empty certificate file")?;
    anyhow::ensure!(
        header.trim() == barbalat_core::certificates::CSV_HEADER,
        "unexpected header {header:?}, expected {:?}",
        barbalat_core::certificates::CSV_HEADER
    );
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let line_no = i + 2;
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            anyhow::ensure!(cells.len() == 5, "line {line_no}: expected 5 fields, found {}", cells.len());
            let num = |k: usize, name: &str| -> Result<f64> {
                cells[k]
                    .parse::<f64>()
                    .with_context(|| format!("line {line_no}: field {name}: invalid number {:?}", cells[k]))
            };
            Ok(CsvRow {
                t: num(0, "t")?,
                f_abs: num(1, "f_abs")?,
                s_value: num(2, "s_value")?,
                bound: num(3, "bound")?,
                satisfied: cells[4]
                    .parse::<bool>()
                    .with_context(|| format!("line {line_no}: field satisfied: expected true or false"))?,
            })
        })
        .collect()
}
