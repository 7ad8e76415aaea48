//! SVG output of complexes and curves. The y axis is flipped so that the picture
//! has the usual mathematical orientation.

use crate::cells::{CellComplex, CellGeometry, Piece};
use crate::geodesic::PiecewiseCurve;
use crate::geom::{Point, Rect};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderStyle {
    /// Largest distance between consecutive vertices of a sampled arc.
    pub arc_step: f64,
    pub edge_width: f64,
    pub curve_width: f64,
    pub point_radius: f64,
    pub face_color: String,
    pub face_opacity: f64,
    pub edge_color: String,
    pub point_color: String,
    pub curve_color: String,
    /// Size of the longer image side, in pixels.
    pub size: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            arc_step: 0.02,
            edge_width: 1.0,
            curve_width: 2.5,
            point_radius: 2.5,
            face_color: "#4a90d9".into(),
            face_opacity: 0.25,
            edge_color: "#222222".into(),
            point_color: "#c0392b".into(),
            curve_color: "#e67e22".into(),
            size: 800.0,
        }
    }
}

fn num(x: f64) -> String {
    let s = format!("{:.6}", x);
    // avoid "-0.000000"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0".to_string()
    } else {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn xy(p: Point) -> String {
    format!("{},{}", num(p[0]), num(-p[1]))
}

fn piece_points(p: &Piece, step: f64, out: &mut Vec<Point>) {
    let n = match p {
        Piece::Segment { .. } => 1,
        Piece::Arc { .. } => ((p.length() / step).ceil() as usize).clamp(1, 100_000),
    };
    let first = if out.is_empty() { 0 } else { 1 };
    for k in first..=n {
        out.push(p.point_at(k as f64 / n as f64));
    }
}

fn loop_path(pieces: &[Piece], step: f64) -> String {
    let mut pts = Vec::new();
    for p in pieces {
        piece_points(p, step, &mut pts);
    }
    let mut d = String::new();
    for (i, q) in pts.iter().enumerate() {
        d.push_str(if i == 0 { "M" } else { " L" });
        d.push_str(&xy(*q));
    }
    d.push_str(" Z");
    d
}

fn open_path(pieces: &[Piece], step: f64) -> String {
    let mut pts = Vec::new();
    for p in pieces {
        piece_points(p, step, &mut pts);
    }
    pts.iter().map(|q| xy(*q)).collect::<Vec<_>>().join(" ")
}

/// SVG 1.1 document: window frame, then faces, edges, points and finally the
/// curves, so that curves are painted on top. One element per cell.
pub fn render_svg(complex: &CellComplex, curves: &[PiecewiseCurve], style: &RenderStyle) -> Vec<u8> {
    let w: Rect = complex.window;
    let step = if style.arc_step > 0.0 { style.arc_step } else { RenderStyle::default().arc_step };
    let scale = style.size / w.width().max(w.height());
    let unit = 1.0 / scale;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        num(w.width() * scale),
        num(w.height() * scale),
        num(w.xmin),
        num(-w.ymax),
        num(w.width()),
        num(w.height())
    );
    let _ = writeln!(
        s,
        r#"<rect class="frame" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
        num(w.xmin),
        num(-w.ymax),
        num(w.width()),
        num(w.height()),
        style.edge_color,
        num(style.edge_width * unit)
    );
    for dim in [2u8, 1, 0] {
        for c in complex.cells_of_dim(dim) {
            match &c.geometry {
                CellGeometry::Face { polygon } => {
                    let mut d = loop_path(&polygon.outer, step);
                    for h in &polygon.holes {
                        d.push(' ');
                        d.push_str(&loop_path(h, step));
                    }
                    let _ = writeln!(
                        s,
                        r#"<path class="cell2" id="c{}" d="{}" fill="{}" fill-opacity="{}" fill-rule="evenodd" stroke="none"/>"#,
                        c.id,
                        d,
                        style.face_color,
                        num(style.face_opacity)
                    );
                }
                CellGeometry::Edge { piece } => {
                    let _ = writeln!(
                        s,
                        r#"<polyline class="cell1" id="c{}" points="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
                        c.id,
                        open_path(std::slice::from_ref(piece), step),
                        style.edge_color,
                        num(style.edge_width * unit)
                    );
                }
                CellGeometry::Point { at } => {
                    let _ = writeln!(
                        s,
                        r#"<circle class="cell0" id="c{}" cx="{}" cy="{}" r="{}" fill="{}"/>"#,
                        c.id,
                        num(at[0]),
                        num(-at[1]),
                        num(style.point_radius * unit),
                        style.point_color
                    );
                }
            }
        }
    }
    for (i, curve) in curves.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<polyline class="curve" id="g{}" points="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
            i,
            open_path(&curve.pieces, step),
            style.curve_color,
            num(style.curve_width * unit)
        );
    }
    s.push_str("</svg>\n");
    s.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::brick_decomposition;
    use crate::poly::Polynomial;

    fn count(svg: &str, tag: &str) -> usize {
        svg.matches(&format!("<{tag} ")).count()
    }

    #[test]
    fn empty_complex_has_only_frame() {
        let c = CellComplex { window: Rect::new(0.0, 2.0, -1.0, 1.0), cells: Vec::new() };
        let svg = String::from_utf8(render_svg(&c, &[], &RenderStyle::default())).unwrap();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(count(&svg, "rect"), 1);
        assert_eq!(count(&svg, "path") + count(&svg, "polyline") + count(&svg, "circle"), 0);
        assert!(svg.contains(r#"viewBox="0 -1 2 2""#));
    }

    #[test]
    fn one_element_per_cell_and_curves_last() {
        let f = Polynomial::new(vec![0.0, 0.0, 1.0]);
        let c = brick_decomposition(&f, Rect::new(-1.0, 1.0, -2.5, 1.5), 1.0).unwrap();
        let curve = PiecewiseCurve::polyline(&[[-1.0, -2.0], [1.0, -1.0]]);
        let svg = String::from_utf8(render_svg(&c, &[curve], &RenderStyle::default())).unwrap();
        let elements = count(&svg, "rect") + count(&svg, "path") + count(&svg, "polyline") + count(&svg, "circle");
        assert_eq!(elements, c.cells.len() + 1 + 1);
        let last_cell = svg.rfind("class=\"cell").unwrap();
        assert!(svg.find("class=\"curve\"").unwrap() > last_cell);
        // y is flipped: the point (0, 0) on the graph is drawn at cy = 0, the rung
        // at y = -1 at +1
        assert!(svg.contains(r#"cy="1""#) || svg.contains(",1 "));
    }

    #[test]
    fn deterministic() {
        let f = Polynomial::new(vec![0.0, 0.0, 1.0]);
        let c = brick_decomposition(&f, Rect::new(-1.0, 1.0, -2.5, 1.5), 1.0).unwrap();
        assert_eq!(render_svg(&c, &[], &RenderStyle::default()), render_svg(&c, &[], &RenderStyle::default()));
        assert_eq!(num(-0.0000001), "0");
        assert_eq!(num(2.5), "2.5");
        assert_eq!(num(-3.0), "-3");
    }
}
