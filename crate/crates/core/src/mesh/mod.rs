//! Curved polygonal meshes: data model, construction, cutting along curves,
//! straightening, validation and a text file format.

mod build;
mod cut;
mod io;
mod validate;

use std::collections::HashMap;
use std::sync::Arc;

pub use build::{deformed_quad_mesh, square_grid};
pub use cut::cut_mesh_with_curve;
pub use io::{load, read_mesh, save, write_mesh};
pub use validate::{validate, MeshQualityReport};

use crate::error::{Error, Result};
use crate::geometry::{EdgeGeom, GaussLegendre, OrientedEdge, ParametricCurve, Vec2};

/// Role of an edge in the boundary value problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeTag {
    Interior,
    /// Flux prescribed (homogeneous); the edge carries no unknowns.
    Essential,
    /// Pressure prescribed.
    Natural,
}

impl EdgeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeTag::Interior => "interior",
            EdgeTag::Essential => "essential",
            EdgeTag::Natural => "natural",
        }
    }
}

impl std::str::FromStr for EdgeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interior" => Ok(EdgeTag::Interior),
            "essential" => Ok(EdgeTag::Essential),
            "natural" => Ok(EdgeTag::Natural),
            other => Err(Error::InvalidInput(format!("unknown edge tag {other:?}"))),
        }
    }
}

/// An edge between two vertices, stored with `vertices[0] <= vertices[1]`.
/// Both indices coincide only for a closed curve bounding an inclusion.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshEdge {
    pub vertices: [usize; 2],
    pub geom: EdgeGeom,
    pub tag: EdgeTag,
}

/// One entry of a cell boundary loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeUse {
    pub edge: usize,
    /// +1 when the cell runs from the edge's first to its second vertex.
    pub sigma: i8,
}

/// A cell: one or more closed loops of edges, outer loop counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub edges: Vec<EdgeUse>,
    pub region: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh {
    vertices: Vec<Vec2>,
    edges: Vec<MeshEdge>,
    cells: Vec<Cell>,
    curves: Vec<Arc<ParametricCurve>>,
}

impl Mesh {
    /// Assembles a mesh and normalizes it: edges get increasing vertex
    /// indices, straight edges take their end points from the vertex list,
    /// clockwise cells are reversed, boundary and interior tags are made
    /// consistent with the incidence, and every curve referenced by an edge
    /// is registered.
    pub fn from_parts(
        vertices: Vec<Vec2>,
        mut edges: Vec<MeshEdge>,
        mut cells: Vec<Cell>,
        mut curves: Vec<Arc<ParametricCurve>>,
    ) -> Result<Self> {
        let nv = vertices.len();
        let mut flipped = vec![false; edges.len()];
        for (i, e) in edges.iter_mut().enumerate() {
            let [a, b] = e.vertices;
            if a >= nv || b >= nv {
                return Err(Error::Topology(format!("edge {i} references a missing vertex")));
            }
            if a > b {
                e.vertices = [b, a];
                e.geom = reversed(&e.geom);
                flipped[i] = true;
            }
            if let EdgeGeom::Straight { .. } = e.geom {
                let [a, b] = e.vertices;
                if a == b {
                    return Err(Error::Topology(format!("straight edge {i} is a loop")));
                }
                e.geom = EdgeGeom::straight(vertices[a], vertices[b]);
            }
        }
        for (c, cell) in cells.iter_mut().enumerate() {
            if cell.edges.is_empty() {
                return Err(Error::Topology(format!("cell {c} has no edges")));
            }
            for u in &mut cell.edges {
                let e = *flipped
                    .get(u.edge)
                    .ok_or_else(|| Error::Topology(format!("cell {c} references missing edge {}", u.edge)))?;
                if u.sigma != 1 && u.sigma != -1 {
                    return Err(Error::Topology(format!("cell {c}: orientation must be +1 or -1")));
                }
                if e {
                    u.sigma = -u.sigma;
                }
            }
        }
        for e in &edges {
            if let Some(curve) = e.geom.curve() {
                register(&mut curves, curve);
            }
        }
        let mut mesh = Mesh {
            vertices,
            edges,
            cells,
            curves,
        };
        mesh.check_loops()?;
        let rule = GaussLegendre::new(8);
        for c in 0..mesh.cells.len() {
            if signed_area(&mesh.cell_boundary(c), &rule)? < 0.0 {
                let cell = &mut mesh.cells[c];
                cell.edges.reverse();
                for u in &mut cell.edges {
                    u.sigma = -u.sigma;
                }
            }
        }
        mesh.check_loops()?;
        mesh.retag();
        mesh.check_topology()?;
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn curves(&self) -> &[Arc<ParametricCurve>] {
        &self.curves
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// The boundary of cell `c` as seen by the geometry routines.
    pub fn cell_boundary(&self, c: usize) -> Vec<OrientedEdge<'_>> {
        self.cells[c]
            .edges
            .iter()
            .map(|u| OrientedEdge::new(&self.edges[u.edge].geom, u.sigma))
            .collect()
    }

    /// Cells (with orientation) incident to each edge.
    pub fn edge_cells(&self) -> Vec<Vec<(usize, i8)>> {
        let mut inc = vec![Vec::new(); self.edges.len()];
        for (c, cell) in self.cells.iter().enumerate() {
            for u in &cell.edges {
                inc[u.edge].push((c, u.sigma));
            }
        }
        inc
    }

    /// Vertex the cell leaves from when traversing `u`.
    pub fn from_vertex(&self, u: EdgeUse) -> usize {
        let [a, b] = self.edges[u.edge].vertices;
        if u.sigma > 0 {
            a
        } else {
            b
        }
    }

    pub fn to_vertex(&self, u: EdgeUse) -> usize {
        let [a, b] = self.edges[u.edge].vertices;
        if u.sigma > 0 {
            b
        } else {
            a
        }
    }

    /// Number of closed boundary loops of cell `c`.
    pub fn loop_count(&self, c: usize) -> usize {
        let edges = &self.cells[c].edges;
        let mut start = self.from_vertex(edges[0]);
        let mut count = 0;
        for (i, &u) in edges.iter().enumerate() {
            if self.to_vertex(u) == start {
                count += 1;
                if let Some(&next) = edges.get(i + 1) {
                    start = self.from_vertex(next);
                }
            }
        }
        count
    }

    /// Sets the tag of every boundary edge from its midpoint.
    pub fn set_boundary_tags(&mut self, mut tag: impl FnMut(Vec2) -> EdgeTag) {
        for e in &mut self.edges {
            if e.tag != EdgeTag::Interior {
                let (a, b) = e.geom.param_interval();
                let t = tag(e.geom.eval(0.5 * (a + b)));
                e.tag = if t == EdgeTag::Interior { EdgeTag::Natural } else { t };
            }
        }
    }

    /// Assigns every cell the region returned for its index.
    pub fn set_regions(&mut self, mut region: impl FnMut(usize) -> usize) {
        for (c, cell) in self.cells.iter_mut().enumerate() {
            cell.region = region(c);
        }
    }

    /// Replaces every curved edge by the chord between its end points.
    pub fn straighten(&self) -> Result<Mesh> {
        if let Some((i, _)) = self.edges.iter().enumerate().find(|(_, e)| e.vertices[0] == e.vertices[1]) {
            return Err(Error::Topology(format!("edge {i} is a closed loop and has no chord")));
        }
        let mut out = self.clone();
        for e in &mut out.edges {
            e.geom = EdgeGeom::straight(self.vertices[e.vertices[0]], self.vertices[e.vertices[1]]);
        }
        Ok(out)
    }

    pub fn is_straight(&self) -> bool {
        self.edges.iter().all(|e| !e.geom.is_curved())
    }

    pub(crate) fn retag(&mut self) {
        let inc = self.edge_cells();
        for (e, cells) in self.edges.iter_mut().zip(&inc) {
            if cells.len() == 2 {
                e.tag = EdgeTag::Interior;
            } else if e.tag == EdgeTag::Interior {
                e.tag = EdgeTag::Natural;
            }
        }
    }

    /// Checks that every cell boundary is a sequence of closed vertex loops.
    fn check_loops(&self) -> Result<()> {
        for (c, cell) in self.cells.iter().enumerate() {
            let mut start = self.from_vertex(cell.edges[0]);
            for (i, &u) in cell.edges.iter().enumerate() {
                let to = self.to_vertex(u);
                if to == start {
                    if let Some(&next) = cell.edges.get(i + 1) {
                        start = self.from_vertex(next);
                    }
                    continue;
                }
                match cell.edges.get(i + 1) {
                    Some(&next) if self.from_vertex(next) == to => {}
                    _ => {
                        return Err(Error::Topology(format!(
                            "cell {c}: boundary loop is not closed after edge {}",
                            u.edge
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    /// Incidence and geometric consistency checks.
    pub fn check_topology(&self) -> Result<()> {
        self.check_loops()?;
        for (i, cells) in self.edge_cells().iter().enumerate() {
            let e = &self.edges[i];
            match cells.as_slice() {
                [] => return Err(Error::Topology(format!("edge {i} belongs to no cell"))),
                [_] if e.tag == EdgeTag::Interior => {
                    return Err(Error::Topology(format!("boundary edge {i} is tagged interior")))
                }
                [_] => {}
                [(_, s), (_, t)] if s + t == 0 => {}
                [(a, _), (b, _)] => {
                    return Err(Error::Topology(format!(
                        "edge {i} is traversed in the same direction by cells {a} and {b}"
                    )))
                }
                _ => return Err(Error::Topology(format!("edge {i} belongs to {} cells", cells.len()))),
            }
            let [a, b] = e.vertices;
            if a > b {
                return Err(Error::Topology(format!("edge {i} is not normalized")));
            }
            let scale = (e.geom.start() - e.geom.end()).norm().max(self.vertex_scale(a));
            let gap = (e.geom.start() - self.vertices[a]).norm().max((e.geom.end() - self.vertices[b]).norm());
            if gap > 1e-12 * scale.max(1.0) {
                return Err(Error::Topology(format!(
                    "edge {i}: geometry misses its vertices by {gap:e}"
                )));
            }
        }
        Ok(())
    }

    fn vertex_scale(&self, v: usize) -> f64 {
        self.vertices[v].norm()
    }
}

/// The same edge with its two vertices exchanged.
fn reversed(g: &EdgeGeom) -> EdgeGeom {
    match g {
        EdgeGeom::Straight { p0, p1 } => EdgeGeom::straight(*p1, *p0),
        EdgeGeom::Curved { curve, t0, t1, orient } => EdgeGeom::Curved {
            curve: curve.clone(),
            t0: *t0,
            t1: *t1,
            orient: -orient,
        },
    }
}

fn register(curves: &mut Vec<Arc<ParametricCurve>>, curve: &Arc<ParametricCurve>) {
    if let crate::geometry::CurveKind::Composite { pieces } = curve.kind() {
        for p in pieces {
            register(curves, p);
        }
    }
    if !curves.iter().any(|c| c.name() == curve.name()) {
        curves.push(curve.clone());
    }
}

/// Signed area enclosed by a boundary (positive for counterclockwise).
pub(crate) fn signed_area(boundary: &[OrientedEdge], rule: &GaussLegendre) -> Result<f64> {
    let origin = boundary[0].from_point();
    let mut area = 0.0;
    for e in boundary {
        let dir = e.traversal();
        for s in e.geom.samples(rule)? {
            area += dir * s.weight * (s.point.x - origin.x) * s.velocity.y;
        }
    }
    Ok(area)
}

/// Curves indexed by name.
pub(crate) fn curve_index(curves: &[Arc<ParametricCurve>]) -> HashMap<&str, Arc<ParametricCurve>> {
    curves.iter().map(|c| (c.name(), c.clone())).collect()
}
