//! report.json, metrics.csv and per-metric SVG charts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::Method;
use crate::error::{CliError, Result};
use crate::experiment::BenchReport;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub method: Method,
    pub size: usize,
    pub metric: String,
    pub value: f64,
}

/// Flattens a report to `(method, size, metric, value)` rows.
pub fn metric_rows(report: &BenchReport) -> Vec<MetricRow> {
    report
        .rows
        .iter()
        .flat_map(|r| {
            r.metrics
                .named_values()
                .into_iter()
                .map(move |(name, value)| MetricRow {
                    method: r.method,
                    size: r.sample_size,
                    metric: name.to_string(),
                    value,
                })
        })
        .collect()
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes `report.json`, `metrics.csv` and one `<metric>.svg` per metric
/// into `dir`, returning the written paths.
pub fn emit_outputs(report: &BenchReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();

    let json_path = dir.join("report.json");
    let json = serde_json::to_string_pretty(report)?;
    std::fs::write(&json_path, json).map_err(|e| io_err(&json_path, e))?;
    written.push(json_path);

    let rows = metric_rows(report);
    let csv_path = dir.join("metrics.csv");
    let mut writer = csv::Writer::from_path(&csv_path).map_err(|e| io_err(&csv_path, e))?;
    for row in &rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|e| io_err(&csv_path, e))?;
    written.push(csv_path);

    let mut metrics: Vec<&str> = Vec::new();
    for row in &rows {
        if !metrics.contains(&row.metric.as_str()) {
            metrics.push(&row.metric);
        }
    }
    for metric in metrics {
        let path = dir.join(format!("{metric}.svg"));
        std::fs::write(&path, line_chart(report, &rows, metric)).map_err(|e| io_err(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

pub fn load_report(path: &Path) -> Result<BenchReport> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<MetricRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    reader
        .deserialize()
        .map(|r| r.map_err(|e| io_err(path, e)))
        .collect()
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Static SVG line chart of `metric` against sample size, one polyline
/// per method.
pub fn line_chart(report: &BenchReport, rows: &[MetricRow], metric: &str) -> String {
    let (width, height) = (640.0, 400.0);
    let (left, right, top, bottom) = (70.0, 130.0, 40.0, 50.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;

    let points: Vec<&MetricRow> = rows.iter().filter(|r| r.metric == metric).collect();
    let mut sizes: Vec<usize> = points.iter().map(|r| r.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let (x_min, x_max) = match (sizes.first(), sizes.last()) {
        (Some(&a), Some(&b)) if a < b => (a as f64, b as f64),
        (Some(&a), _) => (a as f64 - 1.0, a as f64 + 1.0),
        _ => (0.0, 1.0),
    };
    let mut y_min = points.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    let mut y_max = points
        .iter()
        .map(|r| r.value)
        .fold(f64::NEG_INFINITY, f64::max);
    if !y_min.is_finite() || !y_max.is_finite() {
        (y_min, y_max) = (0.0, 1.0);
    }
    if y_max - y_min < 1e-12 {
        y_min -= 1.0;
        y_max += 1.0;
    } else {
        let pad = 0.05 * (y_max - y_min);
        y_min -= pad;
        y_max += pad;
    }
    let sx = |x: f64| left + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| top + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{metric} vs sample size</text>"#,
        left + plot_w / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{left}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/><line x1="{left}" y1="{top}" x2="{left}" y2="{y0}" stroke="black"/>"#,
        y0 = top + plot_h,
        x1 = left + plot_w
    );
    for &s in &sizes {
        let x = sx(s as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{y1}" stroke="black"/><text x="{x:.2}" y="{yt}" text-anchor="middle">{s}</text>"#,
            y0 = top + plot_h,
            y1 = top + plot_h + 5.0,
            yt = top + plot_h + 18.0
        );
    }
    for t in 0..=4 {
        let v = y_min + (y_max - y_min) * t as f64 / 4.0;
        let y = sy(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{x0}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/><line x1="{left}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#dddddd"/><text x="{xt}" y="{yb:.2}" text-anchor="end">{label}</text>"##,
            x0 = left - 5.0,
            x1 = left + plot_w,
            xt = left - 8.0,
            yb = y + 4.0,
            label = fmt_tick(v)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">sample size</text>"#,
        left + plot_w / 2.0,
        height - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{yc}" text-anchor="middle" transform="rotate(-90 18 {yc})">{metric}</text>"#,
        yc = top + plot_h / 2.0
    );

    for (i, method) in report.methods().iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut series: Vec<(f64, f64)> = points
            .iter()
            .filter(|r| r.method == *method)
            .map(|r| (r.size as f64, r.value))
            .collect();
        series.sort_by(|a, b| a.0.total_cmp(&b.0));
        let coords: Vec<String> = series
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" data-method="{method}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        for &(x, y) in &series {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = top + 10.0 + 20.0 * i as f64;
        let lx = left + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{method}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
