use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::runner::RunReport;
use crate::error::Result;

fn num(v: f64) -> String {
    let s = format!("{v:.12}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// `t,P0,P1[,Pe],total,f_real,f_imag,norm`, one row per grid point; `total`
/// is `Σ P_n` and `norm` its square root.
pub fn csv_string(report: &RunReport) -> String {
    let traj = &report.trajectory;
    let mut out = String::new();
    out.push('t');
    for label in &report.level_labels {
        out.push(',');
        out.push_str(label);
    }
    out.push_str(",total,f_real,f_imag,norm\n");
    for i in 0..traj.grid.len() {
        out.push_str(&num(traj.grid.time(i)));
        for level in &traj.populations {
            out.push(',');
            out.push_str(&num(level[i]));
        }
        let total = traj.total_norm[i];
        for v in [total, report.phase.f_real[i], report.phase.f_imag[i], total.sqrt()] {
            out.push(',');
            out.push_str(&num(v));
        }
        out.push('\n');
    }
    out
}

pub fn export_csv(report: &RunReport, path: &Path) -> Result<()> {
    fs::write(path, csv_string(report))?;
    Ok(())
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const MAX_POINTS: usize = 1200;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#000000"];

/// Line chart of the populations and their total against `t/T`.
pub fn svg_string(report: &RunReport) -> String {
    let traj = &report.trajectory;
    let n = traj.grid.len();
    let stride = n.div_ceil(MAX_POINTS).max(1);
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if *idx.last().unwrap() != n - 1 {
        idx.push(n - 1);
    }

    let x0 = traj.grid.t0() / report.period;
    let x1 = traj.grid.tf() / report.period;
    let peak = traj.total_norm.iter().copied().fold(1.0, f64::max);
    let y1 = (peak * 10.0).ceil() / 10.0;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (WIDTH - LEFT - RIGHT);
    let py = |y: f64| HEIGHT - BOTTOM - y / y1 * (HEIGHT - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (bx, by) = (HEIGHT - BOTTOM, WIDTH - RIGHT);
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT} {TOP} V{bx} H{by}" fill="none" stroke="black" stroke-width="1"/>"#
    );

    let ticks = (x1 - x0).round().max(1.0) as usize;
    let every = ticks.div_ceil(12).max(1);
    for k in (0..=ticks).step_by(every) {
        let x = x0 + k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(x),
            bx + 16.0,
            x
        );
    }
    for k in 0..=4 {
        let y = y1 * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.2}</text>"#,
            LEFT - 6.0,
            py(y) + 4.0,
            y
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t/T</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">population</text>"#,
        (TOP + bx) / 2.0,
        (TOP + bx) / 2.0
    );

    let mut series: Vec<(&str, &Vec<f64>)> = report
        .level_labels
        .iter()
        .map(String::as_str)
        .zip(&traj.populations)
        .collect();
    series.push(("total", &traj.total_norm));
    for (k, (label, values)) in series.iter().enumerate() {
        let color = COLORS[k.min(COLORS.len() - 1)];
        let dash = if *label == "total" { r#" stroke-dasharray="6 3""# } else { "" };
        let points: Vec<String> = idx
            .iter()
            .map(|&i| format!("{:.2},{:.2}", px(traj.grid.time(i) / report.period), py(values[i])))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{ly:.2}" fill="{color}">{label}</text>"#,
            WIDTH - RIGHT - 50.0
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn export_svg(report: &RunReport, path: &Path) -> Result<()> {
    fs::write(path, svg_string(report))?;
    Ok(())
}
