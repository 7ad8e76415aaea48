use super::arrangement::{Arrangement, VERTEX_TOL};
use super::piece::{inside_loops, intersect_pieces, Piece, PieceHits};
use crate::geom::{self, Point, Rect};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type CellId = usize;

/// Closure of a 2-cell: an outer counter-clockwise loop of pieces, plus inner
/// loops when the face is not simply connected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedPolygon {
    pub outer: Vec<Piece>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<Vec<Piece>>,
    pub interior_point: Point,
}

impl GeneralizedPolygon {
    pub fn loops(&self) -> impl Iterator<Item = &Piece> + Clone {
        self.outer.iter().chain(self.holes.iter().flatten())
    }

    pub fn vertices(&self) -> Vec<Point> {
        self.outer.iter().map(|p| p.start()).collect()
    }

    pub fn area(&self) -> f64 {
        0.5 * self.loops().map(|p| p.area_term()).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CellGeometry {
    Point { at: Point },
    Edge { piece: Piece },
    Face { polygon: GeneralizedPolygon },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: CellId,
    pub dim: u8,
    pub geometry: CellGeometry,
    /// Lower-dimensional cells in the closure of this one.
    pub boundary: Vec<CellId>,
}

/// A finite cell complex clipped to a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellComplex {
    pub window: Rect,
    pub cells: Vec<Cell>,
}

/// Counts of cells by dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCounts {
    pub points: usize,
    pub edges: usize,
    pub faces: usize,
}

impl CellComplex {
    pub fn counts(&self) -> CellCounts {
        let n = |d| self.cells.iter().filter(|c| c.dim == d).count();
        CellCounts { points: n(0), edges: n(1), faces: n(2) }
    }

    pub fn incidence(&self) -> BTreeMap<CellId, Vec<CellId>> {
        self.cells.iter().map(|c| (c.id, c.boundary.clone())).collect()
    }

    pub fn cells_of_dim(&self, d: u8) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(move |c| c.dim == d)
    }

    pub fn edge_pieces(&self) -> Vec<Piece> {
        self.cells
            .iter()
            .filter_map(|c| match &c.geometry {
                CellGeometry::Edge { piece } => Some(piece.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn points(&self) -> Vec<Point> {
        self.cells
            .iter()
            .filter_map(|c| match c.geometry {
                CellGeometry::Point { at } => Some(at),
                _ => None,
            })
            .collect()
    }

    pub fn locator(&self) -> Locator<'_> {
        let boxes = self
            .cells
            .iter()
            .map(|c| match &c.geometry {
                CellGeometry::Point { at } => Rect::around(&[*at]),
                CellGeometry::Edge { piece } => piece.bbox(),
                CellGeometry::Face { polygon } => polygon.outer.iter().fold(
                    Rect::new(f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
                    |r, p| r.union(&p.bbox()),
                ),
            })
            .collect();
        Locator { complex: self, boxes }
    }

    /// Structural checks; returns human readable problems (empty when valid).
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            if c.id != i {
                issues.push(format!("cell {} stored at index {}", c.id, i));
            }
            for &b in &c.boundary {
                match self.cells.get(b) {
                    Some(bc) if bc.dim < c.dim => {}
                    _ => issues.push(format!("cell {} has bad boundary reference {}", c.id, b)),
                }
            }
            if let CellGeometry::Face { polygon } = &c.geometry {
                if !polygon.holes.is_empty() {
                    issues.push(format!("2-cell {} is not simply connected", c.id));
                }
            }
            if let CellGeometry::Edge { piece } = &c.geometry {
                for &b in &c.boundary {
                    if let Some(CellGeometry::Point { at }) = self.cells.get(b).map(|x| &x.geometry) {
                        let d = geom::dist(*at, piece.start()).min(geom::dist(*at, piece.end()));
                        if d > VERTEX_TOL {
                            issues.push(format!("1-cell {} does not end at its 0-cell {}", c.id, b));
                        }
                    }
                }
            }
        }
        let pts: Vec<(CellId, Point)> = self
            .cells
            .iter()
            .filter_map(|c| if let CellGeometry::Point { at } = c.geometry { Some((c.id, at)) } else { None })
            .collect();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                if geom::dist(pts[i].1, pts[j].1) <= VERTEX_TOL {
                    issues.push(format!("0-cells {} and {} coincide", pts[i].0, pts[j].0));
                }
            }
        }
        let edges: Vec<(CellId, &Piece)> = self
            .cells
            .iter()
            .filter_map(|c| if let CellGeometry::Edge { piece } = &c.geometry { Some((c.id, piece)) } else { None })
            .collect();
        for i in 0..edges.len() {
            let bi = edges[i].1.bbox();
            for j in (i + 1)..edges.len() {
                if !bi.intersects(&edges[j].1.bbox(), VERTEX_TOL) {
                    continue;
                }
                match intersect_pieces(edges[i].1, edges[j].1, 1e-9) {
                    PieceHits::Points(h) => {
                        for (s, t) in h {
                            let p = edges[i].1.point_at(s);
                            let at_end = |e: &Piece| geom::dist(p, e.start()).min(geom::dist(p, e.end())) <= VERTEX_TOL;
                            if !(at_end(edges[i].1) && at_end(edges[j].1)) {
                                issues.push(format!("1-cells {} and {} cross at ({}, {}) t={t}", edges[i].0, edges[j].0, p[0], p[1]));
                            }
                        }
                    }
                    PieceHits::Overlap => {
                        let (a, b) = (edges[i].1, edges[j].1);
                        let (d, t) = a.distance(b.midpoint());
                        if d <= VERTEX_TOL && t > 1e-9 && t < 1.0 - 1e-9 {
                            issues.push(format!("1-cells {} and {} overlap", edges[i].0, edges[j].0));
                        }
                    }
                }
            }
        }
        issues
    }

    /// Builds a complex from an arrangement, keeping the vertices, edges and faces
    /// whose representative point passes `keep` (called with the point and the dimension).
    pub fn from_arrangement(arr: &Arrangement, keep: &dyn Fn(Point, u8) -> bool) -> CellComplex {
        let mut cells = Vec::new();
        let mut vid = vec![None; arr.vertices.len()];
        for (i, &p) in arr.vertices.iter().enumerate() {
            if arr.vertex_closed[i] && keep(p, 0) {
                vid[i] = Some(cells.len());
                cells.push(Cell { id: cells.len(), dim: 0, geometry: CellGeometry::Point { at: p }, boundary: Vec::new() });
            }
        }
        let mut eid = vec![None; arr.edges.len()];
        for (i, e) in arr.edges.iter().enumerate() {
            if keep(e.piece.midpoint(), 1) {
                eid[i] = Some(cells.len());
                let mut boundary: Vec<CellId> = e.v.iter().filter_map(|&v| vid[v]).collect();
                boundary.dedup();
                cells.push(Cell { id: cells.len(), dim: 1, geometry: CellGeometry::Edge { piece: e.piece.clone() }, boundary });
            }
        }
        for f in &arr.faces {
            if !keep(f.interior_point, 2) {
                continue;
            }
            let mut boundary = Vec::new();
            for lp in std::iter::once(&f.outer).chain(f.holes.iter()) {
                for &(e, _) in lp {
                    if let Some(c) = eid[e] {
                        boundary.push(c);
                    }
                    for &v in &arr.edges[e].v {
                        if let Some(c) = vid[v] {
                            boundary.push(c);
                        }
                    }
                }
            }
            boundary.sort_unstable();
            boundary.dedup();
            let polygon = GeneralizedPolygon {
                outer: arr.loop_pieces(&f.outer),
                holes: f.holes.iter().map(|h| arr.loop_pieces(h)).collect(),
                interior_point: f.interior_point,
            };
            cells.push(Cell { id: cells.len(), dim: 2, geometry: CellGeometry::Face { polygon }, boundary });
        }
        CellComplex { window: arr.window, cells }
    }

    /// Concatenates cells of complexes with disjoint underlying sets.
    pub fn disjoint_union(window: Rect, parts: Vec<CellComplex>) -> CellComplex {
        let mut cells = Vec::new();
        for part in parts {
            let off = cells.len();
            for mut c in part.cells {
                c.id += off;
                for b in c.boundary.iter_mut() {
                    *b += off;
                }
                cells.push(c);
            }
        }
        CellComplex { window, cells }
    }
}

/// Point location with cached bounding boxes.
pub struct Locator<'a> {
    complex: &'a CellComplex,
    boxes: Vec<Rect>,
}

impl Locator<'_> {
    /// Cells containing `p`; a point within `tol` of a lower-dimensional cell is
    /// attributed to that cell only.
    pub fn cells_containing(&self, p: Point, tol: f64) -> Vec<CellId> {
        for dim in 0..=2u8 {
            let mut hits = Vec::new();
            for (c, b) in self.complex.cells.iter().zip(&self.boxes) {
                if c.dim != dim || !b.contains(p, tol) {
                    continue;
                }
                let inside = match &c.geometry {
                    CellGeometry::Point { at } => geom::dist(*at, p) <= tol,
                    CellGeometry::Edge { piece } => piece.distance(p).0 <= tol,
                    CellGeometry::Face { polygon } => inside_loops(polygon.loops(), p, 0.0).unwrap_or(false),
                };
                if inside {
                    hits.push(c.id);
                }
            }
            if !hits.is_empty() {
                return hits;
            }
        }
        Vec::new()
    }

    pub fn locate(&self, p: Point, tol: f64) -> Option<CellId> {
        self.cells_containing(p, tol).first().copied()
    }
}
