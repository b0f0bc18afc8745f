//! Report data model and text artifact builders (CSV, SVG).
//!
//! `report.json` and `report.txt` carry identical content; CSV columns use 17
//! significant digits so outputs are byte-reproducible across runs.

use crate::chern::ChernReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckLine {
    pub fn new(name: &str, value: f64, tolerance: f64) -> Self {
        CheckLine {
            name: name.to_string(),
            value,
            tolerance,
            pass: value.abs() <= tolerance,
        }
    }

    pub fn flag(name: &str, pass: bool) -> Self {
        CheckLine {
            name: name.to_string(),
            value: if pass { 0.0 } else { 1.0 },
            tolerance: 0.5,
            pass,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapSummary {
    pub c_g: f64,
    pub location: Vec<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecaySummary {
    pub band: usize,
    pub b: f64,
    pub r_squared: f64,
    pub range: (f64, f64),
    pub shells_used: usize,
    pub capped: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaugeSummary {
    pub trs_residual: f64,
    pub seam_residual: f64,
    pub range_residual: f64,
    pub orthonormality: f64,
    pub smoothness: f64,
    pub max_winding: f64,
    pub min_overlap: f64,
    pub input_trs_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Report {
    pub pipeline: String,
    pub model: String,
    pub checks: Vec<CheckLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chern: Option<ChernReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub decay: Vec<DecaySummary>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub tpuv: Vec<(usize, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub artifacts: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn new(pipeline: &str, model: &str) -> Self {
        Report {
            pipeline: pipeline.to_string(),
            model: model.to_string(),
            pass: true,
            ..Default::default()
        }
    }

    pub fn push(&mut self, line: CheckLine) {
        self.pass &= line.pass;
        self.checks.push(line);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Human-readable rendering with the same content as the JSON.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("pipeline: {}\nmodel: {}\n", self.pipeline, self.model));
        for c in &self.checks {
            s.push_str(&format!(
                "check {:<44} value {:>14.6e}  tol {:>9.1e}  {}\n",
                c.name,
                c.value,
                c.tolerance,
                if c.pass { "pass" } else { "FAIL" }
            ));
        }
        if let Some(g) = &self.gap {
            s.push_str(&format!(
                "gap: C_g = {:.12e} at {:?} ({})\n",
                g.c_g,
                g.location,
                if g.pass { "pass" } else { "FAIL" }
            ));
        }
        if let Some(ch) = &self.chern {
            for e in &ch.c1 {
                s.push_str(&format!(
                    "c1[{},{}] = {} (residual {:.3e}, curvature {:+.6})\n",
                    e.plane[0], e.plane[1], e.value, e.residual, e.curvature_value
                ));
            }
            if let Some(c2) = &ch.c2 {
                s.push_str(&format!(
                    "c2 = {} (residual {:.3e}, curvature {:+.6})\n",
                    c2.value, c2.residual, c2.curvature_value
                ));
            }
            if let Some(q) = ch.instanton_charge {
                s.push_str(&format!("instanton charge (avg Tr W) = {q:+.6e}\n"));
            }
            s.push_str(&format!(
                "verdict: {:?} (sigma = {}, s = {}, nu = {})\n",
                ch.verdict, ch.sigma, ch.calibration.s, ch.calibration.nu
            ));
        }
        if let Some(g) = &self.gauge {
            s.push_str(&format!(
                "gauge: trs {:.3e} seam {:.3e} range {:.3e} ortho {:.3e} smooth {:.3e}\n",
                g.trs_residual, g.seam_residual, g.range_residual, g.orthonormality, g.smoothness
            ));
        }
        for d in &self.decay {
            s.push_str(&format!(
                "decay band {}: b = {:.6} R2 = {:.6} shells {} range ({:.2},{:.2}){}\n",
                d.band,
                d.b,
                d.r_squared,
                d.shells_used,
                d.range.0,
                d.range.1,
                if d.capped { " capped" } else { "" }
            ));
        }
        for (l, v) in &self.tpuv {
            s.push_str(&format!("tpuv L={l}: {v:.12e}\n"));
        }
        for a in &self.artifacts {
            s.push_str(&format!("artifact: {a}\n"));
        }
        s.push_str(if self.pass { "PASS\n" } else { "FAIL\n" });
        s
    }
}

/// Band table CSV: k1..kd,E1..Ecount, 17 significant digits.
pub fn band_csv(rows: &[(Vec<f64>, Vec<f64>)]) -> String {
    let mut s = String::new();
    if rows.is_empty() {
        return s;
    }
    let d = rows[0].0.len();
    let nb = rows[0].1.len();
    for j in 0..d {
        s.push_str(&format!("k{},", j + 1));
    }
    for b in 0..nb {
        s.push_str(&format!("E{}", b + 1));
        if b + 1 < nb {
            s.push(',');
        }
    }
    s.push('\n');
    for (k, e) in rows {
        for v in k {
            s.push_str(&format!("{v:.16e},"));
        }
        for (b, v) in e.iter().enumerate() {
            s.push_str(&format!("{v:.16e}"));
            if b + 1 < e.len() {
                s.push(',');
            }
        }
        s.push('\n');
    }
    s
}

/// Symmetry report CSV: check name, max residual, tolerance, pass flag, cutoff.
pub fn symmetry_csv(rows: &[(String, f64, f64, bool, i32)]) -> String {
    let mut s = String::from("check,max_residual,tolerance,pass,cutoff\n");
    for (name, res, tol, pass, n) in rows {
        s.push_str(&format!("{name},{res:.16e},{tol:.16e},{pass},{n}\n"));
    }
    s
}

/// Wannier mass CSV: per-cell lattice index, |γ|, mass.
pub fn mass_csv(cells: &[Vec<i64>], dists: &[f64], masses: &[f64]) -> String {
    let mut s = String::from("gamma,abs_gamma,mass\n");
    for ((c, r), m) in cells.iter().zip(dists).zip(masses) {
        let cs: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!("\"{}\",{:.16e},{:.16e}\n", cs.join(" "), r, m));
    }
    s
}

/// Minimal polyline SVG: one series per curve, linear axes.
pub fn svg_lines(series: &[Vec<(f64, f64)>], title: &str) -> String {
    let (w, h, pad) = (720.0, 480.0, 50.0);
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for ser in series {
        for &(x, y) in ser {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax - xmin).abs() < 1e-300 {
        xmax = xmin + 1.0;
    }
    if (ymax - ymin).abs() < 1e-300 {
        ymax = ymin + 1.0;
    }
    let sx = |x: f64| pad + (x - xmin) / (xmax - xmin) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - ymin) / (ymax - ymin) * (h - 2.0 * pad);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{title}</text>\n\
         <rect x=\"{pad}\" y=\"{pad}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
        w / 2.0,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    for (i, ser) in series.iter().enumerate() {
        if ser.is_empty() {
            continue;
        }
        let pts: Vec<String> = ser.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        s.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.4\"/>\n",
            pts.join(" "),
            colors[i % colors.len()]
        ));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_json_round_trip() {
        let mut r = Report::new("chern", "skyrmion");
        r.push(CheckLine::new("flux", 1e-14, 1e-10));
        r.push(CheckLine::flag("verdict-present", true));
        let j = r.to_json();
        let back: Report = serde_json::from_str(&j).unwrap();
        assert_eq!(back.pipeline, "chern");
        assert_eq!(back.checks.len(), 2);
        assert!(back.pass);
        assert!(r.to_text().contains("PASS"));
    }

    #[test]
    fn empty_report_is_valid() {
        let r = Report::new("validate", "m");
        let j = r.to_json();
        let back: Report = serde_json::from_str(&j).unwrap();
        assert!(back.checks.is_empty());
        assert!(back.pass);
    }

    #[test]
    fn failed_check_flips_overall_pass() {
        let mut r = Report::new("validate", "m");
        r.push(CheckLine::new("flux", 1.0, 1e-10));
        assert!(!r.pass);
        assert!(r.to_text().contains("FAIL"));
    }

    #[test]
    fn band_csv_format() {
        let rows = vec![(vec![0.0, 0.5], vec![1.0, 2.0])];
        let csv = band_csv(&rows);
        assert!(csv.starts_with("k1,k2,E1,E2\n"));
        assert!(csv.contains("5.0000000000000000e-1"));
    }

    #[test]
    fn svg_is_well_formed() {
        let s = svg_lines(&[vec![(0.0, 0.0), (1.0, 1.0)]], "bands");
        assert!(s.starts_with("<svg"));
        assert!(s.ends_with("</svg>\n"));
        assert!(s.contains("polyline"));
    }
}
