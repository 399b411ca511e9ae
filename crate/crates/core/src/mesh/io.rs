//! Line-oriented text format for meshes.
//!
//! ```text
//! CURVES <count>
//! <name> polygraph <a> <b> <n> <c_0> ... <c_{n-1}>
//! <name> sinegraph <a> <b> <amplitude> <frequency> <phase> <offset>
//! <name> circle <a> <b> <cx> <cy> <radius>
//! <name> segment <a> <b> <x0> <y0> <x1> <y1>
//! <name> composite <a> <b> <n> <piece names...>
//! VERTICES <count>
//! <index> <x> <y>
//! EDGES <count>
//! <index> <v0> <v1> <interior|essential|natural> S
//! <index> <v0> <v1> <tag> C <curve> <t0> <t1> <orient>
//! CELLS <count>
//! <region> <n> <+-(edge + 1)> ...
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Floats are written
//! with 17 significant digits so that a save/load round trip is exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::{FromStr, SplitWhitespace};
use std::sync::Arc;

use super::{curve_index, Cell, EdgeTag, EdgeUse, Mesh, MeshEdge};
use crate::error::{Error, Result};
use crate::geometry::{CurveKind, EdgeGeom, ParametricCurve, Vec2};

pub fn save(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_mesh(mesh, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Mesh> {
    read_mesh(BufReader::new(File::open(path)?))
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Curves with every composite after its pieces.
fn ordered_curves(mesh: &Mesh) -> Vec<Arc<ParametricCurve>> {
    fn visit(c: &Arc<ParametricCurve>, out: &mut Vec<Arc<ParametricCurve>>) {
        if out.iter().any(|o| o.name() == c.name()) {
            return;
        }
        if let CurveKind::Composite { pieces } = c.kind() {
            for p in pieces {
                visit(p, out);
            }
        }
        out.push(c.clone());
    }
    let mut out = Vec::new();
    for c in mesh.curves() {
        visit(c, &mut out);
    }
    out
}

pub fn write_mesh(mesh: &Mesh, mut w: impl Write) -> Result<()> {
    let curves = ordered_curves(mesh);
    writeln!(w, "CURVES {}", curves.len())?;
    for c in &curves {
        let (a, b) = c.interval();
        let params = match c.kind() {
            CurveKind::PolynomialGraph { coeffs } => {
                let mut s = format!("polygraph {} {} {}", f(a), f(b), coeffs.len());
                for &x in coeffs {
                    s.push(' ');
                    s.push_str(&f(x));
                }
                s
            }
            CurveKind::SineGraph { amplitude, frequency, phase, offset } => format!(
                "sinegraph {} {} {} {} {} {}",
                f(a),
                f(b),
                f(*amplitude),
                f(*frequency),
                f(*phase),
                f(*offset)
            ),
            CurveKind::Circle { center, radius } => {
                format!("circle {} {} {} {} {}", f(a), f(b), f(center.x), f(center.y), f(*radius))
            }
            CurveKind::Segment { start, end } => format!(
                "segment {} {} {} {} {} {}",
                f(a),
                f(b),
                f(start.x),
                f(start.y),
                f(end.x),
                f(end.y)
            ),
            CurveKind::Composite { pieces } => {
                let names: Vec<&str> = pieces.iter().map(|p| p.name()).collect();
                format!("composite {} {} {} {}", f(a), f(b), pieces.len(), names.join(" "))
            }
        };
        writeln!(w, "{} {}", c.name(), params)?;
    }
    writeln!(w, "VERTICES {}", mesh.vertices().len())?;
    for (i, v) in mesh.vertices().iter().enumerate() {
        writeln!(w, "{i} {} {}", f(v.x), f(v.y))?;
    }
    writeln!(w, "EDGES {}", mesh.num_edges())?;
    for (i, e) in mesh.edges().iter().enumerate() {
        let geom = match &e.geom {
            EdgeGeom::Straight { .. } => "S".to_string(),
            EdgeGeom::Curved { curve, t0, t1, orient } => {
                format!("C {} {} {} {}", curve.name(), f(*t0), f(*t1), orient)
            }
        };
        writeln!(w, "{i} {} {} {} {geom}", e.vertices[0], e.vertices[1], e.tag.as_str())?;
    }
    writeln!(w, "CELLS {}", mesh.num_cells())?;
    for c in mesh.cells() {
        write!(w, "{} {}", c.region, c.edges.len())?;
        for u in &c.edges {
            let s = (u.edge as i64 + 1) * i64::from(u.sigma);
            write!(w, " {s}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::iter::Enumerate<std::io::Lines<R>>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self) -> Result<String> {
        for (i, l) in self.inner.by_ref() {
            let l = l?;
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            self.line = i + 1;
            return Ok(t.to_string());
        }
        Err(Error::Parse {
            line: self.line + 1,
            message: "unexpected end of file".into(),
        })
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn header(&mut self, name: &str) -> Result<usize> {
        let l = self.next_line()?;
        let mut it = l.split_whitespace();
        if it.next() != Some(name) {
            return Err(self.err(format!("expected section {name}")));
        }
        self.field(&mut it, "count")
    }

    fn field<T: FromStr>(&self, it: &mut SplitWhitespace, what: &str) -> Result<T> {
        let tok = it.next().ok_or_else(|| self.err(format!("missing {what}")))?;
        tok.parse().map_err(|_| self.err(format!("invalid {what} {tok:?}")))
    }

    fn finish(&self, it: &mut SplitWhitespace) -> Result<()> {
        match it.next() {
            None => Ok(()),
            Some(tok) => Err(self.err(format!("unexpected trailing token {tok:?}"))),
        }
    }
}

pub fn read_mesh(r: impl BufRead) -> Result<Mesh> {
    let mut lines = Lines {
        inner: r.lines().enumerate(),
        line: 0,
    };
    let n_curves = lines.header("CURVES")?;
    let mut curves: Vec<Arc<ParametricCurve>> = Vec::with_capacity(n_curves);
    for _ in 0..n_curves {
        let l = lines.next_line()?;
        let mut it = l.split_whitespace();
        let name: String = lines.field(&mut it, "curve name")?;
        let kind_name: String = lines.field(&mut it, "curve kind")?;
        let a: f64 = lines.field(&mut it, "interval start")?;
        let b: f64 = lines.field(&mut it, "interval end")?;
        let mut num = |what: &str| -> Result<f64> { lines.field(&mut it, what) };
        let kind = match kind_name.as_str() {
            "polygraph" => {
                let n = num("coefficient count")? as usize;
                let coeffs = (0..n).map(|_| num("coefficient")).collect::<Result<_>>()?;
                CurveKind::PolynomialGraph { coeffs }
            }
            "sinegraph" => CurveKind::SineGraph {
                amplitude: num("amplitude")?,
                frequency: num("frequency")?,
                phase: num("phase")?,
                offset: num("offset")?,
            },
            "circle" => CurveKind::Circle {
                center: Vec2::new(num("center x")?, num("center y")?),
                radius: num("radius")?,
            },
            "segment" => CurveKind::Segment {
                start: Vec2::new(num("start x")?, num("start y")?),
                end: Vec2::new(num("end x")?, num("end y")?),
            },
            "composite" => {
                let n: usize = lines.field(&mut it, "piece count")?;
                let known = curve_index(&curves);
                let mut pieces = Vec::with_capacity(n);
                for _ in 0..n {
                    let p: String = lines.field(&mut it, "piece name")?;
                    pieces.push(
                        known
                            .get(p.as_str())
                            .cloned()
                            .ok_or_else(|| lines.err(format!("undefined curve {p:?}")))?,
                    );
                }
                CurveKind::Composite { pieces }
            }
            other => return Err(lines.err(format!("unknown curve kind {other:?}"))),
        };
        lines.finish(&mut it)?;
        if curves.iter().any(|c| c.name() == name) {
            return Err(lines.err(format!("curve {name:?} defined twice")));
        }
        let curve = ParametricCurve::new(name, kind, (a, b)).map_err(|e| lines.err(e.to_string()))?;
        curves.push(Arc::new(curve));
    }

    let n_vertices = lines.header("VERTICES")?;
    let mut vertices = Vec::with_capacity(n_vertices);
    for i in 0..n_vertices {
        let l = lines.next_line()?;
        let mut it = l.split_whitespace();
        let idx: usize = lines.field(&mut it, "vertex index")?;
        if idx != i {
            return Err(lines.err(format!("expected vertex {i}, found {idx}")));
        }
        let x = lines.field(&mut it, "x")?;
        let y = lines.field(&mut it, "y")?;
        lines.finish(&mut it)?;
        vertices.push(Vec2::new(x, y));
    }

    let n_edges = lines.header("EDGES")?;
    let known = curve_index(&curves);
    let mut edges = Vec::with_capacity(n_edges);
    for i in 0..n_edges {
        let l = lines.next_line()?;
        let mut it = l.split_whitespace();
        let idx: usize = lines.field(&mut it, "edge index")?;
        if idx != i {
            return Err(lines.err(format!("expected edge {i}, found {idx}")));
        }
        let v0: usize = lines.field(&mut it, "first vertex")?;
        let v1: usize = lines.field(&mut it, "second vertex")?;
        if v0 >= n_vertices || v1 >= n_vertices {
            return Err(lines.err(format!("edge {i} references a missing vertex")));
        }
        let tag: String = lines.field(&mut it, "edge tag")?;
        let tag = EdgeTag::from_str(&tag).map_err(|e| lines.err(e.to_string()))?;
        let kind: String = lines.field(&mut it, "edge geometry")?;
        let geom = match kind.as_str() {
            "S" => EdgeGeom::straight(vertices[v0], vertices[v1]),
            "C" => {
                let name: String = lines.field(&mut it, "curve name")?;
                let curve = known
                    .get(name.as_str())
                    .cloned()
                    .ok_or_else(|| lines.err(format!("undefined curve {name:?}")))?;
                let t0: f64 = lines.field(&mut it, "t0")?;
                let t1: f64 = lines.field(&mut it, "t1")?;
                let orient: i8 = lines.field(&mut it, "orientation")?;
                if !(t0 < t1) || (orient != 1 && orient != -1) {
                    return Err(lines.err(format!("edge {i}: invalid curved geometry")));
                }
                EdgeGeom::Curved { curve, t0, t1, orient }
            }
            other => return Err(lines.err(format!("unknown edge geometry {other:?}"))),
        };
        lines.finish(&mut it)?;
        edges.push(MeshEdge {
            vertices: [v0, v1],
            geom,
            tag,
        });
    }

    let n_cells = lines.header("CELLS")?;
    let mut cells = Vec::with_capacity(n_cells);
    for _ in 0..n_cells {
        let l = lines.next_line()?;
        let mut it = l.split_whitespace();
        let region: usize = lines.field(&mut it, "region")?;
        let n: usize = lines.field(&mut it, "edge count")?;
        let mut uses = Vec::with_capacity(n);
        for _ in 0..n {
            let s: i64 = lines.field(&mut it, "signed edge")?;
            if s == 0 || s.unsigned_abs() as usize > n_edges {
                return Err(lines.err(format!("invalid signed edge {s}")));
            }
            uses.push(EdgeUse {
                edge: s.unsigned_abs() as usize - 1,
                sigma: if s > 0 { 1 } else { -1 },
            });
        }
        lines.finish(&mut it)?;
        cells.push(Cell { edges: uses, region });
    }
    Mesh::from_parts(vertices, edges, cells, curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::square_grid;

    #[test]
    fn round_trip_unit_square() {
        let m = square_grid(1, Vec2::zeros(), Vec2::new(1.0, 1.0)).unwrap();
        let mut buf = Vec::new();
        write_mesh(&m, &mut buf).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn undefined_curve_is_a_parse_error() {
        let text = "CURVES 0\nVERTICES 2\n0 0 0\n1 1 0\nEDGES 1\n0 0 1 natural C nope 0 1 1\nCELLS 0\n";
        match read_mesh(text.as_bytes()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 6);
                assert!(message.contains("nope"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn clockwise_cell_is_flipped_on_load() {
        let text = "\
CURVES 0
VERTICES 4
0 0 0
1 1 0
2 1 1
3 0 1
EDGES 4
0 0 1 natural S
1 1 2 natural S
2 3 2 natural S
3 0 3 natural S
CELLS 1
0 4 4 3 -2 -1
";
        let m = read_mesh(text.as_bytes()).unwrap();
        let signs: Vec<i8> = m.cells()[0].edges.iter().map(|u| u.sigma).collect();
        assert_eq!(signs, vec![1, 1, 1, -1]);
    }
}
