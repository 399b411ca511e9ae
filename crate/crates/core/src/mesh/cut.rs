//! Splitting the cells of a mesh along an embedded curve.

use std::sync::Arc;

use super::{Cell, EdgeUse, Mesh, MeshEdge};
use crate::error::{Error, Result};
use crate::geometry::{cross, element_measures, EdgeGeom, GaussLegendre, ParametricCurve, Vec2};

/// Vertices closer than this (relative to the shortest incident edge) to the
/// curve are moved onto it.
const SNAP: f64 = 1e-9;
/// Samples per edge when searching for sign changes of the level set.
const EDGE_SAMPLES: usize = 16;

/// A point where the curve meets an edge.
#[derive(Debug, Clone, Copy)]
struct Crossing {
    /// Parameter on the edge.
    s: f64,
    /// Parameter on the cutting curve.
    t: f64,
}

/// Cuts every cell crossed by `curve` into two cells sharing a new curved
/// edge. Cells to the left of the curve (inside, for a counterclockwise
/// closed curve) are assigned `left_region`; the others keep their region.
/// A closed curve contained in a single cell becomes the boundary of a new
/// inclusion cell.
pub fn cut_mesh_with_curve(mesh: &Mesh, curve: Arc<ParametricCurve>, left_region: usize) -> Result<Mesh> {
    if curve.level_set(Vec2::zeros()).is_none() {
        return Err(Error::InvalidInput(format!(
            "curve {} has no implicit form and cannot cut a mesh",
            curve.name()
        )));
    }
    let phi = |x: Vec2| curve.level_set(x).map(|(v, _)| v).unwrap_or(f64::NAN);
    let period = curve.period();
    let closed = period.is_some() || curve.is_closed();
    let (ta, tb) = curve.interval();
    let on_curve = |t: f64| period.is_some() || (t >= ta - 1e-12 && t <= tb + 1e-12);

    let mut vertices = mesh.vertices.clone();
    let nv_old = vertices.len();

    // Shortest incident edge per vertex, for the snapping tolerance.
    let mut vscale = vec![f64::INFINITY; nv_old];
    for e in &mesh.edges {
        let len = (e.geom.start() - e.geom.end()).norm();
        for &v in &e.vertices {
            vscale[v] = vscale[v].min(len);
        }
    }

    // Vertices lying on the curve, with their curve parameter.
    let mut vertex_param: Vec<Option<f64>> = vec![None; nv_old];
    for (v, x) in vertices.iter_mut().enumerate() {
        let Some((val, grad)) = curve.level_set(*x) else { continue };
        let g = grad.norm();
        if g == 0.0 || (val / g).abs() >= SNAP * vscale[v] {
            continue;
        }
        let mut y = *x;
        for _ in 0..3 {
            let (val, grad) = curve.level_set(y).unwrap_or((0.0, Vec2::zeros()));
            if grad.norm_squared() > 0.0 {
                y -= grad * (val / grad.norm_squared());
            }
        }
        let t = curve.parameter_of(y);
        if on_curve(t) {
            log::debug!("snapping vertex {v} onto curve {} (moved {:e})", curve.name(), (curve.eval(t) - *x).norm());
            *x = curve.eval(t);
            vertex_param[v] = Some(t);
        }
    }

    // Crossings in the interior of each edge.
    let mut crossings: Vec<Vec<Crossing>> = Vec::with_capacity(mesh.edges.len());
    for (ei, e) in mesh.edges.iter().enumerate() {
        crossings.push(edge_crossings(ei, &e.geom, &curve, &phi, &on_curve, [
            vertex_param[e.vertices[0]].is_some(),
            vertex_param[e.vertices[1]].is_some(),
        ])?);
    }

    // Sub-edges: each old edge becomes a chain of vertices from its first to
    // its second vertex.
    let mut edges: Vec<MeshEdge> = Vec::with_capacity(mesh.edges.len());
    let mut chains: Vec<(Vec<usize>, Vec<usize>)> = Vec::with_capacity(mesh.edges.len());
    let mut point_param: Vec<Option<f64>> = vertex_param.clone();
    for (e, cr) in mesh.edges.iter().zip(&crossings) {
        let [v0, v1] = e.vertices;
        if cr.is_empty() {
            chains.push((vec![v0, v1], vec![edges.len()]));
            edges.push(e.clone());
            continue;
        }
        let (a, b) = e.geom.param_interval();
        let forward = e.geom.orientation() > 0.0;
        // Parameters and vertices ordered from the first vertex.
        let mut params = vec![if forward { a } else { b }];
        let mut chain = vec![v0];
        let ordered: Vec<Crossing> = if forward {
            cr.clone()
        } else {
            cr.iter().rev().copied().collect()
        };
        for c in ordered {
            vertices.push(curve.eval(c.t));
            point_param.push(Some(c.t));
            chain.push(vertices.len() - 1);
            params.push(c.s);
        }
        params.push(if forward { b } else { a });
        chain.push(v1);
        let mut ids = Vec::with_capacity(chain.len() - 1);
        for k in 0..chain.len() - 1 {
            let geom = match &e.geom {
                EdgeGeom::Straight { .. } => EdgeGeom::straight(vertices[chain[k]], vertices[chain[k + 1]]),
                EdgeGeom::Curved { curve: c, orient, .. } => {
                    let (lo, hi) = (params[k].min(params[k + 1]), params[k].max(params[k + 1]));
                    EdgeGeom::Curved { curve: c.clone(), t0: lo, t1: hi, orient: *orient }
                }
            };
            ids.push(edges.len());
            edges.push(MeshEdge {
                vertices: [chain[k], chain[k + 1]],
                geom,
                tag: e.tag,
            });
        }
        chains.push((chain, ids));
    }

    let rule = GaussLegendre::new(8);
    let total_crossings: usize = crossings.iter().map(Vec::len).sum::<usize>()
        + vertex_param.iter().filter(|p| p.is_some()).count();
    let mut cells: Vec<Cell> = Vec::with_capacity(mesh.cells.len());
    for (ci, cell) in mesh.cells.iter().enumerate() {
        // Expand the loop through the split edges.
        let mut uses: Vec<EdgeUse> = Vec::new();
        let mut from: Vec<usize> = Vec::new();
        for u in &cell.edges {
            let (chain, ids) = &chains[u.edge];
            let steps: Vec<(usize, usize, usize)> = (0..ids.len()).map(|k| (ids[k], chain[k], chain[k + 1])).collect();
            let ordered: Box<dyn Iterator<Item = &(usize, usize, usize)>> = if u.sigma > 0 {
                Box::new(steps.iter())
            } else {
                Box::new(steps.iter().rev())
            };
            for &(id, a, b) in ordered {
                let (start, _) = if u.sigma > 0 { (a, b) } else { (b, a) };
                uses.push(EdgeUse { edge: id, sigma: u.sigma });
                from.push(start);
            }
        }
        let loops = mesh.loop_count(ci);
        let inside = |x: Vec2| point_in_loop(&edges, &uses, x);

        // Crossing vertices on this cell's boundary.
        let mut hits: Vec<usize> = Vec::new();
        for (pos, &v) in from.iter().enumerate() {
            let Some(t) = point_param[v] else { continue };
            let qualifies = if v >= nv_old {
                true
            } else {
                let d = 1e-6 * vscale[v] / curve.deriv(t).norm().max(f64::MIN_POSITIVE);
                [t - d, t + d].iter().any(|&s| on_curve(s) && inside(curve.eval(s)))
            };
            if qualifies {
                hits.push(pos);
            }
        }
        match hits.len() {
            0 => {
                let boundary: Vec<_> = uses
                    .iter()
                    .map(|u| crate::geometry::OrientedEdge::new(&edges[u.edge].geom, u.sigma))
                    .collect();
                let centroid = element_measures(&boundary, &rule)?.centroid;
                let region = if curve.side_of(centroid) > 0.0 { left_region } else { cell.region };
                if closed && total_crossings == 0 && inside(curve.eval(ta)) {
                    // The whole curve is an inclusion in this cell.
                    let v = vertices.len();
                    vertices.push(curve.eval(ta));
                    let t1 = period.map_or(tb, |p| ta + p);
                    let id = edges.len();
                    edges.push(MeshEdge {
                        vertices: [v, v],
                        geom: EdgeGeom::Curved { curve: curve.clone(), t0: ta, t1, orient: 1 },
                        tag: super::EdgeTag::Interior,
                    });
                    let inner_left = signed_loop_area(&curve, ta, t1) > 0.0;
                    let mut outer = uses.clone();
                    outer.push(EdgeUse { edge: id, sigma: if inner_left { -1 } else { 1 } });
                    cells.push(Cell {
                        edges: outer,
                        region: if inner_left { cell.region } else { left_region },
                    });
                    cells.push(Cell {
                        edges: vec![EdgeUse { edge: id, sigma: if inner_left { 1 } else { -1 } }],
                        region: if inner_left { left_region } else { cell.region },
                    });
                } else {
                    cells.push(Cell { edges: uses, region });
                }
            }
            1 => return Err(Error::CurveEndsInsideCell { cell: ci }),
            2 => {
                if loops > 1 {
                    return Err(Error::Topology(format!("cell {ci} has several boundary loops and cannot be cut")));
                }
                let (pa, pb) = (hits[0], hits[1]);
                let (va, vb) = (from[pa], from[pb]);
                let (tav, tbv) = (point_param[va].unwrap_or(0.0), point_param[vb].unwrap_or(0.0));
                // Parameter interval of the new edge and the vertex at its start.
                let (lo, hi, lo_vertex) = match period {
                    Some(p) => {
                        let tb2 = tav + (tbv - tav).rem_euclid(p);
                        let first = 0.5 * (tav + tb2);
                        let second = 0.5 * (tb2 + tav + p);
                        let in_first = inside(curve.eval(first));
                        let in_second = inside(curve.eval(second));
                        match (in_first, in_second) {
                            (true, false) => (tav, tb2, va),
                            (false, true) => (tb2, tav + p, vb),
                            _ => return Err(Error::TangentialIntersection { edge: uses[pa].edge }),
                        }
                    }
                    None => {
                        let (lo, hi, v) = if tav < tbv { (tav, tbv, va) } else { (tbv, tav, vb) };
                        if !inside(curve.eval(0.5 * (lo + hi))) {
                            return Err(Error::TooManyCrossings { cell: ci, crossings: 2 });
                        }
                        (lo, hi, v)
                    }
                };
                let (v0, v1) = (va.min(vb), va.max(vb));
                let id = edges.len();
                edges.push(MeshEdge {
                    vertices: [v0, v1],
                    geom: EdgeGeom::Curved {
                        curve: curve.clone(),
                        t0: lo,
                        t1: hi,
                        orient: if lo_vertex == v0 { 1 } else { -1 },
                    },
                    tag: super::EdgeTag::Interior,
                });
                let orient = if lo_vertex == v0 { 1 } else { -1 };
                let m = uses.len();
                // From A to B along the old boundary, then back along the curve.
                let mut first: Vec<EdgeUse> = (pa..pb).map(|i| uses[i]).collect();
                let s_ba = if vb == v0 { 1 } else { -1 };
                first.push(EdgeUse { edge: id, sigma: s_ba });
                let mut second: Vec<EdgeUse> = (pb..m).chain(0..pa).map(|i| uses[i]).collect();
                second.push(EdgeUse { edge: id, sigma: -s_ba });
                for (piece, sigma) in [(first, s_ba), (second, -s_ba)] {
                    let left = sigma * orient > 0;
                    cells.push(Cell {
                        edges: piece,
                        region: if left { left_region } else { cell.region },
                    });
                }
            }
            n => return Err(Error::TooManyCrossings { cell: ci, crossings: n }),
        }
    }

    let mut curves = mesh.curves.clone();
    if !curves.iter().any(|c| c.name() == curve.name()) {
        curves.push(curve.clone());
    }
    Mesh::from_parts(vertices, edges, cells, curves)
}

/// Sign changes of the level set along the interior of an edge, refined by
/// bisection and Newton steps and sorted by edge parameter.
fn edge_crossings(
    index: usize,
    geom: &EdgeGeom,
    curve: &ParametricCurve,
    phi: &impl Fn(Vec2) -> f64,
    on_curve: &impl Fn(f64) -> bool,
    snapped: [bool; 2],
) -> Result<Vec<Crossing>> {
    let (a, b) = geom.param_interval();
    let forward = geom.orientation() > 0.0;
    // Values at the parameter ends; a snapped vertex counts as zero.
    let end_zero = |s: f64| {
        let at_first = if forward { s == a } else { s == b };
        let at_second = if forward { s == b } else { s == a };
        (at_first && snapped[0]) || (at_second && snapped[1])
    };
    let samples: Vec<(f64, f64)> = (0..=EDGE_SAMPLES)
        .map(|i| {
            let s = if i == EDGE_SAMPLES { b } else { a + (b - a) * i as f64 / EDGE_SAMPLES as f64 };
            let v = if end_zero(s) { 0.0 } else { phi(geom.eval(s)) };
            (s, v)
        })
        .collect();
    let mut out = Vec::new();
    for w in samples.windows(2) {
        let ((mut lo, flo), (mut hi, _)) = (w[0], w[1]);
        if !(flo * w[1].1 < 0.0) {
            continue;
        }
        let sign_lo = flo.signum();
        while hi - lo > 1e-13 * (b - a) {
            let mid = 0.5 * (lo + hi);
            if phi(geom.eval(mid)).signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut s = 0.5 * (lo + hi);
        let mut slope = 0.0;
        for _ in 0..3 {
            let x = geom.eval(s);
            let Some((val, grad)) = curve.level_set(x) else { break };
            slope = grad.dot(&geom.deriv(s));
            if slope == 0.0 {
                break;
            }
            let next = s - val / slope;
            if next >= lo && next <= hi {
                s = next;
            }
        }
        let x = geom.eval(s);
        let g = curve.level_set(x).map_or(0.0, |(_, g)| g.norm());
        if slope.abs() < 1e-8 * g * geom.deriv(s).norm() {
            return Err(Error::TangentialIntersection { edge: index });
        }
        let t = curve.parameter_of(x);
        if on_curve(t) {
            out.push(Crossing { s, t });
        }
    }
    Ok(out)
}

/// Winding-number test against a boundary loop, sampling curved edges.
fn point_in_loop(edges: &[MeshEdge], uses: &[EdgeUse], x: Vec2) -> bool {
    let mut winding = 0.0;
    for u in uses {
        let g = &edges[u.edge].geom;
        let (a, b) = g.param_interval();
        let n = if g.is_curved() { 32 } else { 1 };
        let forward = f64::from(u.sigma) * g.orientation() > 0.0;
        let mut prev = None;
        for i in 0..=n {
            let s = if forward { a + (b - a) * i as f64 / n as f64 } else { b - (b - a) * i as f64 / n as f64 };
            let p = g.eval(s) - x;
            if let Some(q) = prev {
                winding += cross(q, p).atan2(q.dot(&p));
            }
            prev = Some(p);
        }
    }
    winding > std::f64::consts::PI
}

fn signed_loop_area(curve: &ParametricCurve, a: f64, b: f64) -> f64 {
    GaussLegendre::new(32).integrate(a, b, |t| cross(curve.eval(t), curve.deriv(t)))
}
