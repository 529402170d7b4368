//! SVG overlay of a sampled boundary and predicted ellipses.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use nrange_core::{BoundaryTrace, Cplx, EllipseHull};

const SIZE: f64 = 600.0;
const PAD: f64 = 30.0;
const ELLIPSE_POINTS: usize = 240;

struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
    off_x: f64,
    off_y: f64,
}

impl Frame {
    fn fit(points: &[Cplx]) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            x0 = x0.min(p.re);
            x1 = x1.max(p.re);
            y0 = y0.min(p.im);
            y1 = y1.max(p.im);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        let scale = (SIZE - 2.0 * PAD) / span;
        Frame {
            x0,
            y1,
            scale,
            off_x: PAD + 0.5 * (span - (x1 - x0)) * scale,
            off_y: PAD + 0.5 * (span - (y1 - y0)) * scale,
        }
    }

    // y grows downward in SVG.
    fn map(&self, p: Cplx) -> (f64, f64) {
        (self.off_x + (p.re - self.x0) * self.scale, self.off_y + (self.y1 - p.im) * self.scale)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn ellipse_outline(hull: &EllipseHull) -> Vec<Vec<Cplx>> {
    hull.ellipses
        .iter()
        .map(|e| (0..ELLIPSE_POINTS).map(|i| e.point_at(TAU * i as f64 / ELLIPSE_POINTS as f64)).collect())
        .collect()
}

fn polyline_points(frame: &Frame, pts: &[Cplx]) -> String {
    let mut s = String::new();
    for p in pts.iter().chain(pts.first()) {
        let (x, y) = frame.map(*p);
        let _ = write!(s, "{x:.3},{y:.3} ");
    }
    s.pop();
    s
}

pub fn render(trace: &BoundaryTrace, hull: Option<&EllipseHull>, title: Option<&str>) -> String {
    let boundary: Vec<Cplx> = trace.samples.iter().map(|s| s.point).collect();
    let outlines = hull.map(ellipse_outline).unwrap_or_default();
    let isolated: &[Cplx] = hull.map_or(&[], |h| &h.isolated_points);

    let mut all = boundary.clone();
    all.extend(outlines.iter().flatten());
    all.extend(trace.anchors);
    all.extend(isolated);
    let frame = Frame::fit(&all);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    if let Some(t) = title {
        let _ = writeln!(out, "  <title>{}</title>", escape(t));
    }
    let _ = writeln!(out, "  <rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "  <polyline class=\"boundary\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"{}\"/>",
        polyline_points(&frame, &boundary)
    );
    for outline in &outlines {
        let _ = writeln!(
            out,
            "  <polyline class=\"ellipse\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1\" stroke-dasharray=\"6 4\" points=\"{}\"/>",
            polyline_points(&frame, outline)
        );
    }
    for (name, z) in [("alpha", trace.anchors[0]), ("beta", trace.anchors[1])] {
        let (x, y) = frame.map(z);
        let _ = writeln!(out, "  <circle class=\"{name}\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"#2a6fdb\"/>");
    }
    for z in isolated {
        let (x, y) = frame.map(*z);
        let _ = writeln!(out, "  <circle class=\"isolated\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"2\" fill=\"black\"/>");
    }
    out.push_str("</svg>\n");
    out
}
