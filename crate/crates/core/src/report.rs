//! Deterministic SVG rendering of the F-beta plot and the JSON/CSV segment reports.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{BetaGrid, ClassifierRecord, CrossoverPoint, CurveSummary, Mode, Segment};

/// Winner colors, assigned in order of first appearance along the beta axis.
pub const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
    "#bcbd22", "#393b79",
];
pub const LOSER_GRAY: &str = "#cccccc";
pub const BAND_OPACITY: f64 = 0.2;
pub const CANVAS_WIDTH: f64 = 1200.0;
pub const CANVAS_HEIGHT: f64 = 500.0;
pub const CURVE_PANEL_WIDTH: f64 = 800.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("report has no curves or no segments")]
    EmptyDocument,
    #[error("segment winner {0:?} has no curve")]
    UnknownWinner(String),
    #[error("significance runs must be sorted, disjoint and inside the beta range")]
    BadSignificanceRuns,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub grid: BetaGrid,
    pub curves: Vec<CurveSummary>,
    /// Source estimates, used for the scatter panel.
    pub records: Vec<ClassifierRecord>,
    pub crossovers: Vec<CrossoverPoint>,
    pub segments: Vec<Segment>,
    pub significance_runs: Vec<(f64, f64)>,
    pub alpha: f64,
    pub mode: Mode,
}

impl ReportDocument {
    pub fn validate(&self) -> Result<(), RenderError> {
        if self.curves.is_empty() || self.segments.is_empty() {
            return Err(RenderError::EmptyDocument);
        }
        for s in &self.segments {
            if !self.curves.iter().any(|c| c.name == s.winner) {
                return Err(RenderError::UnknownWinner(s.winner.clone()));
            }
        }
        let (lo, hi) = (self.grid.beta_min(), self.grid.beta_max());
        let mut prev_hi = f64::NEG_INFINITY;
        for &(a, b) in &self.significance_runs {
            if a < lo || b > hi || a > b || a <= prev_hi {
                return Err(RenderError::BadSignificanceRuns);
            }
            prev_hi = b;
        }
        Ok(())
    }

    /// Winner names in order of first appearance.
    pub fn winners(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for s in &self.segments {
            if !out.contains(&s.winner.as_str()) {
                out.push(&s.winner);
            }
        }
        out
    }

    fn colors(&self) -> HashMap<&str, &'static str> {
        self.winners()
            .into_iter()
            .enumerate()
            .map(|(i, w)| (w, PALETTE[i % PALETTE.len()]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub title: String,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            title: "F-beta plot".to_string(),
        }
    }
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Maps log10(beta) and F to canvas coordinates in the curve panel.
#[derive(Debug, Clone, Copy)]
pub struct CurvePanel {
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
    log_min: f64,
    log_max: f64,
}

impl CurvePanel {
    pub fn new(grid: &BetaGrid) -> Self {
        Self {
            left: 70.0,
            right: CURVE_PANEL_WIDTH - 20.0,
            top: 40.0,
            bottom: CANVAS_HEIGHT - 60.0,
            log_min: grid.beta_min().log10(),
            log_max: grid.beta_max().log10(),
        }
    }

    pub fn x_of(&self, beta: f64) -> f64 {
        self.left
            + (beta.log10() - self.log_min) / (self.log_max - self.log_min)
                * (self.right - self.left)
    }

    pub fn y_of(&self, f: f64) -> f64 {
        self.bottom - f.clamp(0.0, 1.0) * (self.bottom - self.top)
    }
}

struct ScatterPanel {
    left: f64,
    size: f64,
    top: f64,
}

impl ScatterPanel {
    fn new() -> Self {
        Self {
            left: CURVE_PANEL_WIDTH + 80.0,
            size: 250.0,
            top: 40.0,
        }
    }

    /// Recall on x, precision on y.
    fn xy(&self, tpr: f64, ppv: f64) -> (f64, f64) {
        (
            self.left + tpr * self.size,
            self.top + (1.0 - ppv) * self.size,
        )
    }
}

fn decade_label(k: i32) -> String {
    if k >= 0 {
        format!("{}", 10f64.powi(k))
    } else {
        format!("{:.*}", (-k) as usize, 10f64.powi(k))
    }
}

fn polyline_points(xs: impl Iterator<Item = (f64, f64)>) -> String {
    let mut s = String::new();
    for (i, (x, y)) in xs.enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.6},{y:.6}");
    }
    s
}

pub fn render_svg(doc: &ReportDocument, opts: &RenderOptions) -> Result<String, RenderError> {
    doc.validate()?;
    let colors = doc.colors();
    let panel = CurvePanel::new(&doc.grid);
    let betas = doc.grid.points();
    let mut svg = String::new();

    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#,
        w = CANVAS_WIDTH,
        h = CANVAS_HEIGHT
    );
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{CANVAS_WIDTH:.0}" height="{CANVAS_HEIGHT:.0}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text class="title" x="{:.6}" y="24" text-anchor="middle" font-size="15">{} ({})</text>"#,
        (panel.left + panel.right) / 2.0,
        esc(&opts.title),
        doc.mode.as_str()
    );

    // curve panel frame and ticks
    let _ = writeln!(
        svg,
        r##"<rect class="frame" x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="none" stroke="#000000"/>"##,
        panel.left,
        panel.top,
        panel.right - panel.left,
        panel.bottom - panel.top
    );
    let k_lo = doc.grid.beta_min().log10().ceil() as i32;
    let k_hi = doc.grid.beta_max().log10().floor() as i32;
    for k in k_lo..=k_hi {
        let x = panel.x_of(10f64.powi(k));
        let _ = writeln!(
            svg,
            r##"<line class="tick" x1="{x:.6}" y1="{b:.6}" x2="{x:.6}" y2="{b5:.6}" stroke="#000000"/>"##,
            b = panel.bottom,
            b5 = panel.bottom + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="tick-label" x="{x:.6}" y="{:.6}" text-anchor="middle">{}</text>"#,
            panel.bottom + 18.0,
            decade_label(k)
        );
    }
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let y = panel.y_of(f);
        let _ = writeln!(
            svg,
            r##"<line class="tick" x1="{:.6}" y1="{y:.6}" x2="{:.6}" y2="{y:.6}" stroke="#000000"/>"##,
            panel.left - 5.0,
            panel.left
        );
        let _ = writeln!(
            svg,
            r#"<text class="tick-label" x="{:.6}" y="{:.6}" text-anchor="end">{f:.1}</text>"#,
            panel.left - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="axis-label" x="{:.6}" y="{:.6}" text-anchor="middle">&#946; (log scale)</text>"#,
        (panel.left + panel.right) / 2.0,
        panel.bottom + 40.0
    );
    let _ = writeln!(
        svg,
        r#"<text class="axis-label" x="20" y="{:.6}" text-anchor="middle" transform="rotate(-90 20 {:.6})">F&#946;</text>"#,
        (panel.top + panel.bottom) / 2.0,
        (panel.top + panel.bottom) / 2.0
    );

    // segment boundaries
    for s in &doc.segments[..doc.segments.len() - 1] {
        let x = panel.x_of(s.beta_hi);
        let _ = writeln!(
            svg,
            r##"<line class="boundary" x1="{x:.6}" y1="{:.6}" x2="{x:.6}" y2="{:.6}" stroke="#888888" stroke-dasharray="4,3"/>"##,
            panel.top, panel.bottom
        );
    }

    // losers underneath, then winner bands, then winner curves
    for c in doc
        .curves
        .iter()
        .filter(|c| !colors.contains_key(c.name.as_str()))
    {
        write_curve(&mut svg, &panel, betas, c, LOSER_GRAY, 1.0);
    }
    if doc.mode == Mode::CrossValidation {
        for w in doc.winners() {
            let c = doc.curves.iter().find(|c| c.name == w).expect("validated");
            write_band(&mut svg, &panel, betas, c, colors[w]);
        }
    }
    for w in doc.winners() {
        let c = doc.curves.iter().find(|c| c.name == w).expect("validated");
        write_curve(&mut svg, &panel, betas, c, colors[w], 2.0);
    }

    for &(lo, hi) in &doc.significance_runs {
        let y = panel.bottom - 6.0;
        let _ = writeln!(
            svg,
            r##"<line class="significance" x1="{:.6}" y1="{y:.6}" x2="{:.6}" y2="{y:.6}" stroke="#000000" stroke-width="4" stroke-linecap="square"/>"##,
            panel.x_of(lo),
            panel.x_of(hi)
        );
    }

    write_scatter(&mut svg, doc, &colors);
    write_legend(&mut svg, doc, &colors);
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn write_curve(
    svg: &mut String,
    panel: &CurvePanel,
    betas: &[f64],
    c: &CurveSummary,
    color: &str,
    width: f64,
) {
    let pts = polyline_points(
        betas
            .iter()
            .zip(&c.mean)
            .map(|(b, m)| (panel.x_of(*b), panel.y_of(*m))),
    );
    let _ = writeln!(
        svg,
        r#"<polyline class="curve" data-classifier="{}" fill="none" stroke="{color}" stroke-width="{width:.1}" points="{pts}"/>"#,
        esc(&c.name)
    );
}

fn write_band(svg: &mut String, panel: &CurvePanel, betas: &[f64], c: &CurveSummary, color: &str) {
    let upper = betas
        .iter()
        .zip(c.mean.iter().zip(&c.std))
        .map(|(b, (m, s))| (panel.x_of(*b), panel.y_of(m + s)));
    let lower = betas
        .iter()
        .zip(c.mean.iter().zip(&c.std))
        .rev()
        .map(|(b, (m, s))| (panel.x_of(*b), panel.y_of(m - s)));
    let mut d = String::new();
    for (i, (x, y)) in upper.chain(lower).enumerate() {
        let _ = write!(d, "{}{x:.6},{y:.6} ", if i == 0 { "M" } else { "L" });
    }
    d.push('Z');
    let _ = writeln!(
        svg,
        r#"<path class="band" data-classifier="{}" fill="{color}" fill-opacity="{BAND_OPACITY:.6}" stroke="none" d="{d}"/>"#,
        esc(&c.name)
    );
}

fn write_scatter(svg: &mut String, doc: &ReportDocument, colors: &HashMap<&str, &'static str>) {
    let sp = ScatterPanel::new();
    let _ = writeln!(
        svg,
        r##"<rect class="frame" x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="none" stroke="#000000"/>"##,
        sp.left, sp.top, sp.size, sp.size
    );
    for i in 0..=5 {
        let v = i as f64 / 5.0;
        let (x, _) = sp.xy(v, 0.0);
        let (_, y) = sp.xy(0.0, v);
        let _ = writeln!(
            svg,
            r#"<text class="tick-label" x="{x:.6}" y="{:.6}" text-anchor="middle">{v:.1}</text>"#,
            sp.top + sp.size + 16.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="tick-label" x="{:.6}" y="{:.6}" text-anchor="end">{v:.1}</text>"#,
            sp.left - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="axis-label" x="{:.6}" y="{:.6}" text-anchor="middle">TPR</text>"#,
        sp.left + sp.size / 2.0,
        sp.top + sp.size + 34.0
    );
    let _ = writeln!(
        svg,
        r#"<text class="axis-label" x="{:.6}" y="{:.6}" text-anchor="middle" transform="rotate(-90 {:.6} {:.6})">PPV</text>"#,
        sp.left - 36.0,
        sp.top + sp.size / 2.0,
        sp.left - 36.0,
        sp.top + sp.size / 2.0
    );
    let losers = doc
        .records
        .iter()
        .filter(|r| !colors.contains_key(r.name.as_str()));
    let winners = doc
        .winners()
        .into_iter()
        .filter_map(|w| doc.records.iter().find(|r| r.name == w));
    for rec in losers.chain(winners) {
        let color = colors.get(rec.name.as_str()).copied().unwrap_or(LOSER_GRAY);
        for p in &rec.folds {
            let (x, y) = sp.xy(p.tpr, p.ppv);
            let _ = writeln!(
                svg,
                r#"<circle class="marker" data-classifier="{}" cx="{x:.6}" cy="{y:.6}" r="4.000000" fill="{color}"/>"#,
                esc(&rec.name)
            );
        }
    }
}

fn write_legend(svg: &mut String, doc: &ReportDocument, colors: &HashMap<&str, &'static str>) {
    let sp = ScatterPanel::new();
    let x = CURVE_PANEL_WIDTH + 30.0;
    let mut y = sp.top + sp.size + 62.0;
    let _ = writeln!(svg, r#"<g class="legend">"#);
    for w in doc.winners() {
        let ranges: Vec<String> = doc
            .segments
            .iter()
            .filter(|s| s.winner == w)
            .map(|s| {
                format!(
                    "[{:.6}, {:.6}]{}",
                    s.beta_lo,
                    s.beta_hi,
                    if s.significant { "*" } else { "" }
                )
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.6}" y="{:.6}" width="10.000000" height="10.000000" fill="{}"/>"#,
            y - 9.0,
            colors[w]
        );
        let _ = writeln!(
            svg,
            r#"<text class="legend-entry" data-classifier="{}" x="{:.6}" y="{y:.6}">{}: &#946; &#8712; {}</text>"#,
            esc(w),
            x + 16.0,
            esc(w),
            ranges.join(", ")
        );
        y += 15.0;
    }
    let _ = writeln!(svg, "</g>");
}

/// Rounds to 9 significant digits.
fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

fn fmt_num(x: f64) -> String {
    serde_json::to_string(&sig9(x)).expect("finite float")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunInterval {
    pub beta_lo: f64,
    pub beta_hi: f64,
}

/// The machine-readable segment report. Field order is the emitted key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentsReport {
    pub mode: Mode,
    pub alpha: f64,
    pub beta_range: [f64; 2],
    pub segments: Vec<Segment>,
    pub crossovers: Vec<CrossoverPoint>,
    pub significance_runs: Vec<RunInterval>,
}

impl SegmentsReport {
    pub fn from_document(doc: &ReportDocument) -> Self {
        Self {
            mode: doc.mode,
            alpha: doc.alpha,
            beta_range: [doc.grid.beta_min(), doc.grid.beta_max()],
            segments: doc.segments.clone(),
            crossovers: doc.crossovers.clone(),
            significance_runs: doc
                .significance_runs
                .iter()
                .map(|&(beta_lo, beta_hi)| RunInterval { beta_lo, beta_hi })
                .collect(),
        }
        .rounded()
    }

    fn rounded(mut self) -> Self {
        self.alpha = sig9(self.alpha);
        self.beta_range = self.beta_range.map(sig9);
        for s in &mut self.segments {
            s.beta_lo = sig9(s.beta_lo);
            s.beta_hi = sig9(s.beta_hi);
        }
        for c in &mut self.crossovers {
            c.beta = sig9(c.beta);
        }
        for r in &mut self.significance_runs {
            r.beta_lo = sig9(r.beta_lo);
            r.beta_hi = sig9(r.beta_hi);
        }
        self
    }

    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(&self.clone().rounded()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn emit_segments_json(doc: &ReportDocument) -> String {
    SegmentsReport::from_document(doc).to_json()
}

pub const SEGMENTS_CSV_HEADER: &str = "beta_lo,beta_hi,winner,significant";

pub fn emit_segments_csv(doc: &ReportDocument) -> String {
    let mut out = String::from(SEGMENTS_CSV_HEADER);
    out.push('\n');
    for s in &doc.segments {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_num(s.beta_lo),
            fmt_num(s.beta_hi),
            s.winner,
            s.significant
        );
    }
    out
}
