//! SVG figures of shadows and cross-sections.
//!
//! Coordinates are written unchanged and the y axis is flipped by a group
//! transform, so numbers in the figure match the JSON report.

use std::fmt::Write;

use rupert_core::{RectPlacement, Vec2};

const MARGIN: f64 = 0.05;

pub struct Figure {
    pub shadow: Vec<Vec2>,
    pub rect: Option<RectPlacement>,
    /// Distance from the rectangle to the shadow boundary, drawn as an
    /// outline around the rectangle.
    pub clearance: Option<f64>,
}

fn points(pts: &[Vec2]) -> String {
    pts.iter()
        .map(|p| format!("{:.12},{:.12}", p.x, p.y))
        .collect::<Vec<_>>()
        .join(" ")
}

impl Figure {
    pub fn render(&self) -> String {
        let (mut lo, mut hi) = (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY));
        for p in &self.shadow {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let span = (hi - lo).max().max(1e-12);
        let pad = MARGIN * span;
        let (x0, y0) = (lo.x - pad, -hi.y - pad);
        let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
        let stroke = span / 300.0;

        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{x0:.12} {y0:.12} {w:.12} {h:.12}">"#
        );
        let _ = writeln!(s, r#"<g transform="scale(1,-1)" stroke-width="{stroke:.12}">"#);
        let _ = writeln!(s, r#"<polygon points="{}" fill="none" stroke="black"/>"#, points(&self.shadow));
        if let Some(rect) = &self.rect {
            if let Some(c) = self.clearance.filter(|c| *c > 0.0) {
                let grown = RectPlacement {
                    width: rect.width + 2.0 * c,
                    height: rect.height + 2.0 * c,
                    ..*rect
                };
                let _ = writeln!(
                    s,
                    r#"<polygon points="{}" fill="none" stroke="gray" stroke-dasharray="{:.12}"/>"#,
                    points(&grown.corners()),
                    4.0 * stroke
                );
            }
            let _ = writeln!(
                s,
                r#"<polygon points="{}" fill="steelblue" fill-opacity="0.3" stroke="steelblue"/>"#,
                points(&rect.corners())
            );
        }
        let _ = writeln!(s, "</g>\n</svg>");
        s
    }
}
