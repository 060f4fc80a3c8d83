//! CSV, JSON and SVG emitters. Numbers are always written as `{:.16e}`
//! (17 significant digits) so identical inputs give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use eit_core::spectroscopy::{linear_index, SusceptibilityPoint};
use serde_json::value::RawValue;

use crate::config::ScenarioConfig;
use crate::CliError;

pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number (or `null` for non-finite values) with fixed formatting.
pub fn num(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() {
        sci(x)
    } else {
        "null".to_owned()
    };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

pub const SPECTRUM_COLUMNS: [&str; 11] = [
    "delta",
    "re_chi_x",
    "im_chi_x",
    "re_chi_y",
    "im_chi_y",
    "re_chi_psi",
    "im_chi_psi",
    "re_delta_chi",
    "im_delta_chi",
    "f_abs",
    "n_eff",
];

fn spectrum_row(p: &SusceptibilityPoint) -> [f64; 11] {
    [
        p.delta,
        p.chi_x.re,
        p.chi_x.im,
        p.chi_y.re,
        p.chi_y.im,
        p.chi_psi.re,
        p.chi_psi.im,
        p.delta_chi.re,
        p.delta_chi.im,
        p.f_abs,
        linear_index(p),
    ]
}

pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(sci).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn spectrum_csv(points: &[SusceptibilityPoint]) -> String {
    csv(
        &SPECTRUM_COLUMNS,
        points.iter().map(|p| spectrum_row(p).to_vec()),
    )
}

#[derive(serde::Serialize)]
pub struct ConfigEcho {
    preset: Option<&'static str>,
    omega_c: Box<RawValue>,
    omega_r: Box<RawValue>,
    psi: Box<RawValue>,
    gamma_ratio: Box<RawValue>,
    delta_min: Box<RawValue>,
    delta_max: Box<RawValue>,
    delta_points: usize,
}

impl ConfigEcho {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        Self {
            preset: cfg.preset.map(|p| p.name()),
            omega_c: num(cfg.omega_c),
            omega_r: num(cfg.omega_r),
            psi: num(cfg.psi),
            gamma_ratio: num(cfg.gamma_ratio),
            delta_min: num(cfg.delta_min),
            delta_max: num(cfg.delta_max),
            delta_points: cfg.delta_points,
        }
    }
}

/// `{"config": ..., "points": [...]}` with one object per row.
pub fn table_json<T: serde::Serialize>(
    config: &T,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> String {
    let keys: Vec<String> = header
        .iter()
        .map(|k| serde_json::to_string(k).expect("key"))
        .collect();
    let mut out = String::from("{\"config\":");
    out.push_str(&serde_json::to_string(config).expect("config serializes"));
    out.push_str(",\"points\":[");
    for (i, row) in rows.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('{');
        for (j, (k, v)) in keys.iter().zip(row).enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{k}:{}", num(v).get());
        }
        out.push('}');
    }
    out.push_str("]}\n");
    out
}

pub fn spectrum_json(cfg: &ScenarioConfig, points: &[SusceptibilityPoint]) -> String {
    table_json(
        &ConfigEcho::new(cfg),
        &SPECTRUM_COLUMNS,
        points.iter().map(|p| spectrum_row(p).to_vec()),
    )
}

pub struct Series<'a> {
    pub label: &'a str,
    pub values: Vec<f64>,
    pub dashed: bool,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn tick_label(v: f64, span: f64) -> String {
    if v == 0.0 {
        "0".to_owned()
    } else if !(1e-2..=1e4).contains(&span) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Line plot with axes, ticks and a legend; solid or dashed strokes per series.
pub fn svg_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    x: &[f64],
    series: &[Series<'_>],
) -> String {
    let finite = |v: &&f64| v.is_finite();
    let (x0, x1) = x
        .iter()
        .filter(finite)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let (mut y0, mut y1) = series
        .iter()
        .flat_map(|s| s.values.iter())
        .filter(finite)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if !(y0.is_finite() && y1.is_finite()) {
        (y0, y1) = (-1.0, 1.0);
    }
    if y1 - y0 <= 0.0 {
        let pad = if y0 == 0.0 { 1.0 } else { y0.abs() * 0.1 };
        (y0, y1) = (y0 - pad, y1 + pad);
    }
    let pad = 0.05 * (y1 - y0);
    (y0, y1) = (y0 - pad, y1 + pad);
    let (x0, x1) = if x1 > x0 {
        (x0, x1)
    } else {
        (x0 - 1.0, x0 + 1.0)
    };

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + (v - x0) / (x1 - x0) * pw;
    let py = |v: f64| TOP + (y1 - v) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    for k in 0..=5 {
        let xv = x0 + (x1 - x0) * k as f64 / 5.0;
        let yv = y0 + (y1 - y0) * k as f64 / 5.0;
        let (tx, ty) = (px(xv), py(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{tx:.2}" y1="{}" x2="{tx:.2}" y2="{}" stroke="black"/><text x="{tx:.2}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            tick_label(xv, x1 - x0)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ty:.2}" x2="{LEFT}" y2="{ty:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            ty + 4.0,
            tick_label(yv, y1 - y0)
        );
    }
    if y0 < 0.0 && y1 > 0.0 {
        let z = py(0.0);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{z:.2}" x2="{}" y2="{z:.2}" stroke="#999" stroke-width="0.5"/>"##,
            LEFT + pw
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(y_label)
    );

    for (i, ser) in series.iter().enumerate() {
        let dash = if ser.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let pts: Vec<String> = x
            .iter()
            .zip(&ser.values)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(&a, &b)| format!("{:.2},{:.2}", px(a), py(b)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="black" stroke-width="1.5"{dash} points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 15.0 + 18.0 * i as f64;
        let lx = LEFT + pw - 120.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="black" stroke-width="1.5"{dash}/><text x="{}" y="{}">{}</text>"#,
            lx + 30.0,
            lx + 36.0,
            ly + 4.0,
            escape(ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}
