use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::fem::EigRecord;
use crate::format::{fmt15, fmt_sig};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt15(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// One checked assertion. `slack` is the signed margin: nonnegative (or
/// positive, for strict checks) exactly when the assertion passed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    /// The owning module's invariant this row checks.
    pub invariant: String,
    pub pass: bool,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
    pub detail: String,
}

impl Verdict {
    pub fn at_least(name: impl Into<String>, invariant: &str, measured: f64, bound: f64) -> Self {
        let slack = measured - bound;
        Self::make(name, invariant, slack >= 0.0, measured, bound, slack)
    }

    pub fn at_most(name: impl Into<String>, invariant: &str, measured: f64, bound: f64) -> Self {
        let slack = bound - measured;
        Self::make(name, invariant, slack >= 0.0, measured, bound, slack)
    }

    pub fn below(name: impl Into<String>, invariant: &str, measured: f64, bound: f64) -> Self {
        let slack = bound - measured;
        Self::make(name, invariant, slack > 0.0, measured, bound, slack)
    }

    pub fn above(name: impl Into<String>, invariant: &str, measured: f64, bound: f64) -> Self {
        let slack = measured - bound;
        Self::make(name, invariant, slack > 0.0, measured, bound, slack)
    }

    /// A failure that has no numeric margin (e.g. a solver error).
    pub fn failed(name: impl Into<String>, invariant: &str, detail: impl Into<String>) -> Self {
        Self::make(name, invariant, false, f64::NAN, f64::NAN, f64::NAN).with_detail(detail)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    fn make(name: impl Into<String>, invariant: &str, pass: bool, measured: f64, bound: f64, slack: f64) -> Self {
        // NaN measurements never pass.
        let pass = pass && !measured.is_nan();
        Self { name: name.into(), invariant: invariant.into(), pass, measured, bound, slack, detail: String::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn line(label: &str, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, dashed: false }
    }

    pub fn dashed(label: &str, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, dashed: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plot {
    /// File stem suffix: `<command>_<name>.svg`.
    pub name: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
    pub records: Vec<EigRecord>,
    pub plots: Vec<Plot>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self { command: command.into(), columns: columns.iter().map(|c| c.to_string()).collect(), ..Self::default() }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn verdicts_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            command: &'a str,
            all_pass: bool,
            verdicts: &'a [Verdict],
            notes: &'a [String],
        }
        let doc = Doc { command: &self.command, all_pass: self.all_pass(), verdicts: &self.verdicts, notes: &self.notes };
        serde_json::to_string_pretty(&doc).expect("verdicts serialize") + "\n"
    }

    /// Writes `<command>.csv`, `<command>_verdicts.json`,
    /// `<command>_metadata.json`, `<command>_eigs.json` (FEM commands) and one
    /// SVG per plot. Returns the written paths.
    pub fn write(&self, dir: &Path, meta: &Metadata) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: String, body: String| -> Result<()> {
            let path = dir.join(name);
            fs::write(&path, body)?;
            written.push(path);
            Ok(())
        };
        let c = &self.command;
        put(format!("{c}.csv"), self.to_csv())?;
        put(format!("{c}_verdicts.json"), self.verdicts_json())?;
        put(format!("{c}_metadata.json"), serde_json::to_string_pretty(meta).expect("metadata serialize") + "\n")?;
        if !self.records.is_empty() {
            put(format!("{c}_eigs.json"), serde_json::to_string_pretty(&self.records).expect("records serialize") + "\n")?;
        }
        for plot in &self.plots {
            put(format!("{c}_{}.svg", plot.name), render_svg(plot))?;
        }
        Ok(written)
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#555555"];

/// Minimal SVG line chart: axes, min/max ticks, one polyline per series.
pub fn render_svg(plot: &Plot) -> String {
    let (w, h) = (640.0, 420.0);
    let (left, right, top, bottom) = (80.0, 20.0, 40.0, 60.0);
    let tx = |x: f64| if plot.log_x { x.log10() } else { x };
    let pts: Vec<(f64, f64)> = plot
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|&(x, y)| (tx(x), y)))
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let span = |v: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo <= 1e-300 {
            (lo - 0.5, hi + 0.5)
        } else {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        }
    };
    let (x0, x1) = span(&mut pts.iter().map(|p| p.0));
    let (y0, y1) = span(&mut pts.iter().map(|p| p.1));
    let px = |x: f64| left + (tx(x) - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15" font-family="sans-serif">{}</text>"#, w / 2.0, escape(&plot.title));
    let (ax0, ax1, ay0, ay1) = (left, w - right, h - bottom, top);
    let _ = writeln!(s, r#"<path d="M{ax0},{ay1} L{ax0},{ay0} L{ax1},{ay0}" fill="none" stroke="black"/>"#);
    let ticks = 5;
    for i in 0..=ticks {
        let f = i as f64 / ticks as f64;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let xpos = left + f * (w - left - right);
        let ypos = h - bottom - f * (h - top - bottom);
        let xl = if plot.log_x { fmt_sig(10f64.powf(xv), 3) } else { fmt_sig(xv, 4) };
        let _ = writeln!(s, r#"<line x1="{xpos:.2}" y1="{ay0}" x2="{xpos:.2}" y2="{}" stroke="black"/>"#, ay0 + 5.0);
        let _ = writeln!(s, r#"<text x="{xpos:.2}" y="{}" text-anchor="middle" font-size="11" font-family="sans-serif">{}</text>"#, ay0 + 18.0, xl);
        let _ = writeln!(s, r#"<line x1="{}" y1="{ypos:.2}" x2="{ax0}" y2="{ypos:.2}" stroke="black"/>"#, ax0 - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="11" font-family="sans-serif">{}</text>"#, ax0 - 8.0, ypos + 4.0, fmt_sig(yv, 4));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13" font-family="sans-serif">{}</text>"#, (ax0 + ax1) / 2.0, h - 15.0, escape(&plot.x_label));
    let _ = writeln!(s, r#"<text x="18" y="{}" text-anchor="middle" font-size="13" font-family="sans-serif" transform="rotate(-90 18 {})">{}</text>"#, (ay0 + ay1) / 2.0, (ay0 + ay1) / 2.0, escape(&plot.y_label));
    for (i, series) in plot.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = series
            .points
            .iter()
            .filter(|(x, y)| tx(*x).is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let dash = if series.dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>"#, coords.join(" "));
        if !series.dashed {
            for c in &coords {
                let (cx, cy) = c.split_once(',').expect("coordinate pair");
                let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
            }
        }
        let ly = top + 14.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.8"{dash}/>"#, ax1 - 170.0, ax1 - 145.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" font-family="sans-serif">{}</text>"#, ax1 - 140.0, ly + 4.0, escape(&series.label));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
