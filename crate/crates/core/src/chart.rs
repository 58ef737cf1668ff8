//! Text, SVG and JSON renderings of a [`BigradedBasis`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Window;
use crate::engine::LogEntry;
use crate::instances::{BasisClass, BigradedBasis};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("RANGE_EMPTY: degree range {0:?} and weight range {1:?} must be nonempty")]
    RangeEmpty((i64, i64), (i64, i64)),
    #[error("malformed dump: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelPolicy {
    Full,
    Dots,
}

/// Axes and labeling of a chart. Classes sharing a cell are stacked in basis
/// order: first on top.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChartSpec {
    pub degrees: (i64, i64),
    pub weights: (i64, i64),
    pub labels: LabelPolicy,
}

impl ChartSpec {
    pub fn new(degrees: (i64, i64), weights: (i64, i64), labels: LabelPolicy) -> Self {
        Self {
            degrees,
            weights,
            labels,
        }
    }

    /// The smallest axes containing every class, padded by one on each side.
    pub fn fit(basis: &BigradedBasis, labels: LabelPolicy) -> Self {
        let degrees = basis.degree_span().map_or((0, 0), |(a, b)| (a - 1, b + 1));
        let lo = basis.classes.iter().map(|c| c.adams_weight).min();
        let hi = basis.classes.iter().map(|c| c.adams_weight).max();
        let weights = lo.zip(hi).map_or((0, 0), |(a, b)| (a - 1, b + 1));
        Self::new(degrees, weights, labels)
    }

    fn check(&self) -> Result<(), ChartError> {
        if self.degrees.0 > self.degrees.1 || self.weights.0 > self.weights.1 {
            return Err(ChartError::RangeEmpty(self.degrees, self.weights));
        }
        Ok(())
    }

    fn cells<'a>(&self, basis: &'a BigradedBasis) -> BTreeMap<(i64, i64), Vec<&'a BasisClass>> {
        let mut cells: BTreeMap<(i64, i64), Vec<&BasisClass>> = BTreeMap::new();
        for c in &basis.classes {
            let (d, w) = c.bidegree();
            if (self.degrees.0..=self.degrees.1).contains(&d) && (self.weights.0..=self.weights.1).contains(&w) {
                cells.entry((d, w)).or_default().push(c);
            }
        }
        cells
    }
}

fn cell_text(classes: &[&BasisClass], policy: LabelPolicy) -> String {
    match policy {
        LabelPolicy::Full => classes.iter().map(|c| c.label.as_str()).collect::<Vec<_>>().join(","),
        LabelPolicy::Dots => "*".repeat(classes.len()),
    }
}

fn pad(s: &str, width: usize) -> String {
    let len = s.chars().count();
    format!("{s}{}", " ".repeat(width.saturating_sub(len)))
}

/// Fixed-width grid, highest weight first, one column per degree.
pub fn render_text(basis: &BigradedBasis, spec: &ChartSpec) -> Result<String, ChartError> {
    spec.check()?;
    let cells = spec.cells(basis);
    let degrees: Vec<i64> = (spec.degrees.0..=spec.degrees.1).collect();
    let widths: Vec<usize> = degrees
        .iter()
        .map(|&d| {
            let widest = (spec.weights.0..=spec.weights.1)
                .filter_map(|w| cells.get(&(d, w)))
                .map(|cs| cell_text(cs, spec.labels).chars().count())
                .max()
                .unwrap_or(0);
            widest.max(d.to_string().len()).max(1)
        })
        .collect();
    let margin = [spec.weights.0, spec.weights.1]
        .iter()
        .map(|w| w.to_string().len())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for w in (spec.weights.0..=spec.weights.1).rev() {
        let mut line = format!("{w:>margin$} |");
        for (&d, &width) in degrees.iter().zip(&widths) {
            let text = cells.get(&(d, w)).map(|cs| cell_text(cs, spec.labels)).unwrap_or_else(|| ".".into());
            line.push(' ');
            line.push_str(&pad(&text, width));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    let mut rule = format!("{} +", " ".repeat(margin));
    let mut axis = format!("{} ", " ".repeat(margin + 1));
    for (&d, &width) in degrees.iter().zip(&widths) {
        rule.push_str(&"-".repeat(width + 1));
        axis.push(' ');
        axis.push_str(&pad(&d.to_string(), width));
    }
    out.push_str(&rule);
    out.push('\n');
    out.push_str(axis.trim_end());
    out.push('\n');
    Ok(out)
}

const SCALE: i64 = 48;
const STACK: i64 = 12;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// SVG 1.1 chart with integer coordinates.
pub fn render_svg(basis: &BigradedBasis, spec: &ChartSpec) -> Result<String, ChartError> {
    spec.check()?;
    let cells = spec.cells(basis);
    let columns = spec.degrees.1 - spec.degrees.0 + 1;
    let rows = spec.weights.1 - spec.weights.0 + 1;
    let width = (columns + 1) * SCALE;
    let height = (rows + 1) * SCALE;
    let x = |d: i64| (d - spec.degrees.0) * SCALE + SCALE;
    let y = |w: i64| (spec.weights.1 - w) * SCALE + SCALE / 2;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(s, r##"<g stroke="#dddddd" stroke-width="1">"##);
    for d in spec.degrees.0..=spec.degrees.1 {
        let _ = writeln!(s, r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}"/>"#, x(d), y(spec.weights.1), y(spec.weights.0));
    }
    for w in spec.weights.0..=spec.weights.1 {
        let _ = writeln!(s, r#"<line x1="{1}" y1="{0}" x2="{2}" y2="{0}"/>"#, y(w), x(spec.degrees.0), x(spec.degrees.1));
    }
    let _ = writeln!(s, "</g>");
    let axis_y = y(spec.weights.0) + SCALE / 2;
    let _ = writeln!(s, r#"<g font-family="monospace" font-size="10" fill="black">"#);
    for d in spec.degrees.0..=spec.degrees.1 {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, x(d), axis_y, d);
    }
    for w in spec.weights.0..=spec.weights.1 {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, SCALE / 2, y(w) + 4, w);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g font-family="serif" font-size="10" fill="black">"#);
    for (&(d, w), classes) in &cells {
        let k = classes.len() as i64;
        for (i, c) in classes.iter().enumerate() {
            let cx = x(d);
            let cy = y(w) + (2 * i as i64 - (k - 1)) * STACK / 2;
            let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3"/>"#);
            if spec.labels == LabelPolicy::Full {
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{}" text-anchor="start">{}</text>"#,
                    cx + 5,
                    cy + 4,
                    escape(&c.label)
                );
            }
        }
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s)
}

/// Machine-readable form of a basis with its optional differential log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dump {
    pub p: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i32>,
    pub window: Window,
    pub classes: Vec<BasisClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub differentials: Option<Vec<LogEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labelings: Option<serde_json::Value>,
}

impl Dump {
    pub fn new(basis: &BigradedBasis) -> Self {
        Self {
            p: basis.p,
            n: Some(basis.n),
            window: basis.window,
            classes: basis.classes.clone(),
            differentials: None,
            labelings: None,
        }
    }

    pub fn without_height(mut self) -> Self {
        self.n = None;
        self
    }

    pub fn with_log(mut self, log: &[LogEntry]) -> Self {
        self.differentials = Some(log.to_vec());
        self
    }

    pub fn with_labelings(mut self, labelings: serde_json::Value) -> Self {
        self.labelings = Some(labelings);
        self
    }

    pub fn parse(text: &str) -> Result<Self, ChartError> {
        serde_json::from_str(text).map_err(|e| ChartError::Parse(e.to_string()))
    }
}

pub fn render_json(dump: &Dump) -> String {
    let mut s = serde_json::to_string_pretty(dump).expect("dump serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(classes: &[(&str, i64, i64)]) -> BigradedBasis {
        BigradedBasis::new(
            2,
            -1,
            Window::degrees(-2, 2),
            classes.iter().map(|&(l, d, w)| BasisClass::new(l, d, w)).collect(),
        )
    }

    #[test]
    fn text_grid_marks_cells() {
        let b = basis(&[("1", 0, 0), ("∂", -1, 1)]);
        let spec = ChartSpec::new((-2, 1), (0, 1), LabelPolicy::Dots);
        let text = render_text(&b, &spec).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "1 | .  *  . .");
        assert_eq!(lines[1], "0 | .  .  * .");
        assert_eq!(lines[3], "    -2 -1 0 1");
    }

    #[test]
    fn empty_basis_gives_blank_grid() {
        let b = basis(&[]);
        let text = render_text(&b, &ChartSpec::new((0, 2), (0, 0), LabelPolicy::Full)).unwrap();
        assert!(!text.contains('*'));
        assert_eq!(text.lines().next().unwrap(), "0 | . . .");
    }

    #[test]
    fn empty_ranges_are_rejected() {
        let b = basis(&[]);
        let spec = ChartSpec::new((3, 2), (0, 0), LabelPolicy::Full);
        assert!(matches!(render_text(&b, &spec), Err(ChartError::RangeEmpty(..))));
        assert!(matches!(render_svg(&b, &spec), Err(ChartError::RangeEmpty(..))));
    }

    #[test]
    fn svg_stacks_and_escapes() {
        let b = basis(&[("a<b", 0, 0), ("c", 0, 0), ("d", 1, 0)]);
        let spec = ChartSpec::new((0, 1), (0, 0), LabelPolicy::Full);
        let svg = render_svg(&b, &spec).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("a&lt;b"));
        assert!(svg.contains(r#"cx="48" cy="18""#));
        assert!(svg.contains(r#"cx="48" cy="30""#));
        assert_eq!(svg, render_svg(&b, &spec).unwrap());
    }

    #[test]
    fn single_class_svg() {
        let b = basis(&[("1", 0, 0)]);
        let spec = ChartSpec::fit(&b, LabelPolicy::Full);
        assert_eq!(spec, ChartSpec::new((-1, 1), (-1, 1), LabelPolicy::Full));
        let svg = render_svg(&b, &spec).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains(r#"width="192" height="192""#));
    }

    #[test]
    fn json_round_trip() {
        let b = basis(&[("1", 0, 0), ("∂", -1, 1)]);
        let log = [LogEntry {
            page: 1,
            source: crate::algebra::Trigrade::new(1, 0, 0),
            target: crate::algebra::Trigrade::new(0, 1, 1),
            rank: 1,
        }];
        let dump = Dump::new(&b).with_log(&log);
        let text = render_json(&dump);
        let again = render_json(&Dump::parse(&text).unwrap());
        assert_eq!(text, again);
        let first_keys: Vec<usize> = ["\"p\"", "\"n\"", "\"window\"", "\"classes\"", "\"differentials\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(first_keys.windows(2).all(|w| w[0] < w[1]));
    }
}
