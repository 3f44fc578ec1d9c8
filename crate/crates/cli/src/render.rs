use std::fmt::Write as _;

use kobon_core::arrangement::{build_omatrix, check_simple, ArrangementError};
use kobon_core::exactnum::to_f64;
use kobon_core::omatrix::enumerate_bounded_faces;
use kobon_core::AffineLine;

type Point = (f64, f64);

/// Everything drawn in an SVG render, in world coordinates.
pub struct SvgScene {
    pub size: u32,
    /// `(x_min, x_max, y_min, y_max)`
    pub viewport: (f64, f64, f64, f64),
    /// Sweep label and clipped endpoints of each line.
    pub segments: Vec<(usize, Point, Point)>,
    pub crossings: Vec<Point>,
    pub triangles: Vec<[Point; 3]>,
}

const DEFAULT_EXTENT: f64 = 2.0;
const PADDING: f64 = 0.05;

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let w = hi - lo;
    if w > 0.0 {
        (lo - PADDING * w, hi + PADDING * w)
    } else {
        (lo - DEFAULT_EXTENT / 2.0, hi + DEFAULT_EXTENT / 2.0)
    }
}

fn clip(l: &AffineLine, (x0, x1, y0, y1): (f64, f64, f64, f64)) -> Option<(Point, Point)> {
    let (m, b) = (to_f64(&l.m), to_f64(&l.b));
    let (lo, hi) = if m == 0.0 {
        if b < y0 || b > y1 {
            return None;
        }
        (x0, x1)
    } else {
        let (xa, xb) = ((y0 - b) / m, (y1 - b) / m);
        (x0.max(xa.min(xb)), x1.min(xa.max(xb)))
    };
    (lo <= hi).then_some(((lo, m * lo + b), (hi, m * hi + b)))
}

impl SvgScene {
    pub fn build(lines: &[AffineLine], shade: bool, size: u32) -> Result<SvgScene, ArrangementError> {
        let report = check_simple(lines);
        if !report.is_simple() {
            return Err(ArrangementError::NotSimple(report));
        }
        let (m, labeling) = build_omatrix(lines)?;
        let order = labeling.order();
        let point = |p: usize, q: usize| {
            let (x, y) = lines[order[p]].crossing(&lines[order[q]]).expect("simple lines cross");
            (to_f64(&x), to_f64(&y))
        };
        let mut crossings = Vec::new();
        for p in 0..order.len() {
            for q in p + 1..order.len() {
                crossings.push(point(p, q));
            }
        }
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in &crossings {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let (x0, x1) = padded(x0, x1);
        let (y0, y1) = padded(y0, y1);
        let viewport = (x0, x1, y0, y1);
        let segments = order
            .iter()
            .enumerate()
            .filter_map(|(label, &k)| clip(&lines[k], viewport).map(|(a, b)| (label, a, b)))
            .collect();
        let triangles = if shade {
            enumerate_bounded_faces(&m)
                .triangles()
                .map(|f| {
                    let b = f.boundary();
                    [point(b[0], b[1]), point(b[1], b[2]), point(b[2], b[0])]
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(SvgScene { size, viewport, segments, crossings, triangles })
    }

    fn px(&self, (x, y): Point) -> (f64, f64) {
        let (x0, x1, y0, y1) = self.viewport;
        let s = f64::from(self.size);
        ((x - x0) / (x1 - x0) * s + 0.0, (y1 - y) / (y1 - y0) * s + 0.0)
    }

    pub fn to_svg(&self) -> String {
        let s = self.size;
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#
        );
        let _ = writeln!(out, r#"<rect width="{s}" height="{s}" fill="white"/>"#);
        if !self.triangles.is_empty() {
            let _ = writeln!(out, r##"<g fill="#f4a261" fill-opacity="0.6" stroke="none">"##);
            for t in &self.triangles {
                let pts: Vec<String> = t
                    .iter()
                    .map(|&p| {
                        let (x, y) = self.px(p);
                        format!("{x:.3},{y:.3}")
                    })
                    .collect();
                let _ = writeln!(out, r#"<polygon class="triangle" points="{}"/>"#, pts.join(" "));
            }
            let _ = writeln!(out, "</g>");
        }
        let _ = writeln!(out, r##"<g stroke="#264653" stroke-width="0.8">"##);
        for &(label, a, b) in &self.segments {
            let ((x1, y1), (x2, y2)) = (self.px(a), self.px(b));
            let _ = writeln!(
                out,
                r#"<line class="line" data-label="{label}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#
            );
        }
        let _ = writeln!(out, "</g>");
        let _ = writeln!(out, r##"<g fill="#e76f51">"##);
        for &c in &self.crossings {
            let (x, y) = self.px(c);
            let _ = writeln!(out, r#"<circle class="crossing" cx="{x:.3}" cy="{y:.3}" r="1.5"/>"#);
        }
        let _ = writeln!(out, "</g>");
        let _ = writeln!(out, r#"<g font-family="sans-serif" font-size="10" fill="black">"#);
        for &(label, a, _) in &self.segments {
            let (x, y) = self.px(a);
            let x = x.clamp(2.0, f64::from(s) - 12.0);
            let y = y.clamp(10.0, f64::from(s) - 2.0);
            let _ = writeln!(out, r#"<text class="label" x="{x:.3}" y="{y:.3}">{label}</text>"#);
        }
        let _ = writeln!(out, "</g>");
        out.push_str("</svg>\n");
        out
    }
}
