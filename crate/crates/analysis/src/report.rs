//! Table, structured and plot outputs.
//!
//! Tables carry every frequency twice: in Hz (value / 2 pi) and in rad/s.
//! Numbers are written with six significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use magic_core::coupling::{CouplingReport, CurvatureCouplings, ThreeBodyMap, TransversalCorrections};
use magic_core::oracle::OracleResult;
use magic_core::{to_hz, ChainModel, ChainSolution, ModeDecomposition};
use serde::Serialize;

use crate::error::AppError;
use crate::fit::FitResult;
use crate::sweep::{SweepColumn, SweepRow};

/// Six significant digits, fixed notation for moderate magnitudes.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Header with a `_hz` / `_rad_s` pair for every frequency column.
    fn with_frequencies(fixed: &[&str], frequencies: &[&str]) -> Self {
        let mut header: Vec<String> = fixed.iter().map(|s| s.to_string()).collect();
        for f in frequencies {
            header.push(format!("{f}_hz"));
            header.push(format!("{f}_rad_s"));
        }
        Table { header, rows: Vec::new() }
    }

    fn push(&mut self, fixed: Vec<String>, frequencies: &[f64]) {
        let mut row = fixed;
        for &w in frequencies {
            row.push(sig6(to_hz(w)));
            row.push(sig6(w));
        }
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), AppError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| AppError::csv(path, e))?;
        w.write_record(&self.header).map_err(|e| AppError::csv(path, e))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| AppError::csv(path, e))?;
        }
        w.flush().map_err(|e| AppError::io(path, e))
    }

    /// Right-aligned text rendering for the terminal.
    pub fn to_text(&self) -> String {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| {
                self.rows
                    .iter()
                    .map(|r| r[c].len())
                    .chain([self.header[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

fn idx(i: usize) -> String {
    (i + 1).to_string()
}

pub fn equilibrium_table(chain: &ChainSolution) -> Table {
    let mut t = Table::new(&["ion", "u", "z_m"]);
    for (i, (u, z)) in chain.u.iter().zip(&chain.z0).enumerate() {
        t.rows.push(vec![idx(i), sig6(*u), sig6(*z)]);
    }
    t
}

pub fn modes_table(modes: &ModeDecomposition) -> Table {
    let n = modes.n_modes();
    let mut fixed = vec!["mode".to_string(), "direction".to_string(), "oscillator_width_m".to_string()];
    fixed.extend((0..n).map(|i| format!("b{}", i + 1)));
    let fixed: Vec<&str> = fixed.iter().map(String::as_str).collect();
    let mut t = Table::with_frequencies(&fixed, &["frequency"]);
    for l in 0..n {
        let mut row = vec![idx(l), format!("{:?}", modes.direction).to_lowercase(), sig6(modes.dz[l])];
        row.extend((0..n).map(|i| sig6(modes.s[(i, l)])));
        t.push(row, &[modes.nu[l]]);
    }
    t
}

/// One row per ion pair `i < j`.
pub fn couplings_table(report: &CouplingReport) -> Table {
    let mut t = Table::with_frequencies(&["i", "j"], &["J2"]);
    for i in 0..report.n_ions {
        for j in i + 1..report.n_ions {
            t.push(vec![idx(i), idx(j)], &[report.j2[i][j]]);
        }
    }
    t
}

pub fn three_body_table(report: &CouplingReport) -> Table {
    let mut t = Table::with_frequencies(&["i", "j", "k"], &["coulomb", "trap", "curvature"]);
    let lookup = |m: &ThreeBodyMap, e: &[usize; 3]| m.get(e[0], e[1], e[2]).unwrap_or(0.0);
    for e in report.j3_coulomb.iter() {
        t.push(
            e.ions.iter().map(|&i| idx(i)).collect(),
            &[
                e.value,
                lookup(&report.j3_trap, &e.ions),
                lookup(&report.j3_curvature.symmetrized, &e.ions),
            ],
        );
    }
    t
}

pub fn local_field_table(report: &CouplingReport, coinciding: &[f64]) -> Table {
    let mut t = Table::with_frequencies(&["ion"], &["local_field", "coinciding_index_field"]);
    for (i, (lf, c)) in report.local_field.iter().zip(coinciding).enumerate() {
        t.push(vec![idx(i)], &[*lf, *c]);
    }
    t
}

pub fn curvature_table(c: &CurvatureCouplings) -> Table {
    let mut t = Table::with_frequencies(&["n", "i", "j"], &["J3_curvature"]);
    for e in &c.unsymmetrized {
        t.push(vec![idx(e.n), idx(e.pair[0]), idx(e.pair[1])], &[e.value]);
    }
    t
}

pub fn transversal_table(c: &TransversalCorrections) -> Table {
    let mut t = Table::with_frequencies(&["ion"], &["transversal_local_field", "mode_coupling_max"]);
    for (i, lf) in c.local_field.iter().enumerate() {
        t.push(vec![idx(i)], &[*lf, c.mode_coupling_max]);
    }
    t
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::with_frequencies(&["N"], &["J2_max", "J2_min", "local_field_edge", "resonance_gap"]);
    for r in rows {
        t.push(vec![r.n.to_string()], &[r.j2_max, r.j2_min, r.local_field_edge, r.resonance_gap]);
    }
    t
}

/// A fit of one sweep column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnFit {
    pub column: SweepColumn,
    #[serde(flatten)]
    pub fit: FitResult,
}

pub fn fit_table(fits: &[ColumnFit]) -> Table {
    let mut t = Table::new(&[
        "column",
        "model",
        "residual_space",
        "c_rad_s",
        "c_sigma",
        "a",
        "a_sigma",
        "b",
        "b_sigma",
        "log_rms",
    ]);
    for f in fits {
        let fit = &f.fit;
        let b = fit.log_scale().map_or(String::new(), sig6);
        let b_sigma = fit.param_uncertainties.get(2).map_or(String::new(), |s| sig6(*s));
        t.rows.push(vec![
            f.column.name().into(),
            serde_json::to_value(fit.model).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            serde_json::to_value(fit.residual_space).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            sig6(fit.params[0]),
            sig6(fit.param_uncertainties[0]),
            sig6(fit.params[1]),
            sig6(fit.param_uncertainties[1]),
            b,
            b_sigma,
            sig6(fit.residual),
        ]);
    }
    t
}

pub fn oracle_table(r: &OracleResult) -> Table {
    let mut t = Table::with_frequencies(&["term"], &["extracted", "analytic"]);
    t.header.push("relative_error".into());
    for (key, value) in &r.extracted {
        let analytic = r.analytic.get(key).copied().unwrap_or(f64::NAN);
        t.push(vec![key.clone()], &[*value, analytic]);
        let rel = r.relative_error(key).map_or(String::new(), sig6);
        t.rows.last_mut().expect("just pushed").push(rel);
    }
    t
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), AppError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

/// Equilibrium, modes and couplings of one model.
#[derive(Debug, Serialize)]
pub struct ModelSummary<'a> {
    pub chain: &'a ChainSolution,
    pub axial_modes: &'a ModeDecomposition,
    pub transversal_modes: Option<&'a [ModeDecomposition; 2]>,
}

impl<'a> From<&'a ChainModel> for ModelSummary<'a> {
    fn from(m: &'a ChainModel) -> Self {
        ModelSummary {
            chain: &m.chain,
            axial_modes: &m.axial,
            transversal_modes: m.transversal.as_ref(),
        }
    }
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn decades(lo: f64, hi: f64) -> (f64, f64) {
    let (a, b) = (lo.log10().floor(), hi.log10().ceil());
    if a == b {
        (a, a + 1.0)
    } else {
        (a, b)
    }
}

/// Log-log line plot. Non-positive points are dropped.
pub fn loglog_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h) = (640.0, 440.0);
    let (left, right, top, bottom) = (80.0, 170.0, 40.0, 60.0);
    let positive = |&(x, y): &(f64, f64)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite();
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied().filter(positive)).collect();
    let (xmin, xmax) = all.iter().fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (ymin, ymax) = all.iter().fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let (xa, xb) = if all.is_empty() { (0.0, 1.0) } else { decades(xmin, xmax) };
    let (ya, yb) = if all.is_empty() { (0.0, 1.0) } else { decades(ymin, ymax) };
    let px = |x: f64| left + (x.log10() - xa) / (xb - xa) * (w - left - right);
    let py = |y: f64| h - bottom - (y.log10() - ya) / (yb - ya) * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - left - right,
        h - top - bottom
    );
    for d in xa as i32..=xb as i32 {
        let x = px(10f64.powi(d));
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#, h - bottom, h - bottom + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{d}</text>"#, h - bottom + 18.0);
    }
    for d in ya as i32..=yb as i32 {
        let y = py(10f64.powi(d));
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/>"#, left - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"#, left - 8.0, y + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        left + (w - left - right) / 2.0,
        h - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        top + (h - top - bottom) / 2.0,
        escape(y_label)
    );
    for (k, series) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = series
            .points
            .iter()
            .filter(|p| positive(p))
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let dash = if series.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            pts.join(" ")
        );
        let ly = top + 16.0 * k as f64 + 10.0;
        let lx = w - right + 10.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"{dash}/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&series.label));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Sweep curves in Hz with optional fit overlays.
pub fn sweep_plot(rows: &[SweepRow], columns: &[SweepColumn], fits: &[ColumnFit], title: &str) -> String {
    let mut series = Vec::new();
    for &c in columns {
        series.push(Series {
            label: c.name().into(),
            points: rows.iter().map(|r| (r.n as f64, to_hz(c.value(r)))).collect(),
            dashed: false,
        });
        for f in fits.iter().filter(|f| f.column == c) {
            series.push(Series {
                label: format!("{} fit", c.name()),
                points: rows.iter().map(|r| (r.n as f64, to_hz(f.fit.evaluate(r.n as f64)))).collect(),
                dashed: true,
            });
        }
    }
    loglog_svg(title, "N", "frequency / Hz", &series)
}

/// Local-field profile against ion index (linear axes would hide the sign, so
/// magnitudes are drawn).
pub fn profile_plot(values: &[f64], title: &str) -> String {
    let series = [Series {
        label: "|local field|".into(),
        points: values.iter().enumerate().map(|(i, v)| ((i + 1) as f64, to_hz(v.abs()))).collect(),
        dashed: false,
    }];
    loglog_svg(title, "ion", "frequency / Hz", &series)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), AppError> {
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

/// `<stem>.<ext>` inside `dir`.
pub fn output_path(dir: &Path, stem: &str, ext: &str) -> PathBuf {
    dir.join(format!("{stem}.{ext}"))
}

/// Deterministic stem `<subcommand>_<N>_<gradient>`.
pub fn output_stem(subcommand: &str, n: &str, gradient: f64) -> String {
    format!("{subcommand}_{n}_{gradient}")
}
