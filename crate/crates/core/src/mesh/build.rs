//! Structured quadrilateral meshes.

use std::sync::Arc;

use super::{Cell, EdgeTag, EdgeUse, Mesh, MeshEdge};
use crate::error::{Error, Result};
use crate::geometry::{cross, EdgeGeom, ParametricCurve, Vec2};

/// Index helpers for an `n x n` grid of quadrilaterals.
struct Grid {
    n: usize,
}

impl Grid {
    fn vertex(&self, i: usize, j: usize) -> usize {
        j * (self.n + 1) + i
    }

    fn horizontal(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    fn vertical(&self, i: usize, j: usize) -> usize {
        self.n * (self.n + 1) + j * (self.n + 1) + i
    }

    fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::with_capacity(self.n * self.n);
        for j in 0..self.n {
            for i in 0..self.n {
                cells.push(Cell {
                    edges: vec![
                        EdgeUse { edge: self.horizontal(i, j), sigma: 1 },
                        EdgeUse { edge: self.vertical(i + 1, j), sigma: 1 },
                        EdgeUse { edge: self.horizontal(i, j + 1), sigma: -1 },
                        EdgeUse { edge: self.vertical(i, j), sigma: -1 },
                    ],
                    region: 0,
                });
            }
        }
        cells
    }

    /// Edges in index order; `geom` may replace the straight geometry of a
    /// horizontal edge `(i, j)`.
    fn edges(&self, vertices: &[Vec2], geom: impl Fn(usize, usize) -> Option<EdgeGeom>) -> Vec<MeshEdge> {
        let n = self.n;
        let mut edges = Vec::with_capacity(2 * n * (n + 1));
        for j in 0..=n {
            for i in 0..n {
                let (a, b) = (self.vertex(i, j), self.vertex(i + 1, j));
                edges.push(MeshEdge {
                    vertices: [a, b],
                    geom: geom(i, j).unwrap_or_else(|| EdgeGeom::straight(vertices[a], vertices[b])),
                    tag: if j == 0 || j == n { EdgeTag::Natural } else { EdgeTag::Interior },
                });
            }
        }
        for j in 0..n {
            for i in 0..=n {
                let (a, b) = (self.vertex(i, j), self.vertex(i, j + 1));
                edges.push(MeshEdge {
                    vertices: [a, b],
                    geom: EdgeGeom::straight(vertices[a], vertices[b]),
                    tag: if i == 0 || i == n { EdgeTag::Natural } else { EdgeTag::Interior },
                });
            }
        }
        edges
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("a grid needs at least one cell per side".into()));
    }
    Ok(())
}

/// Uniform `n x n` grid of straight squares on the rectangle `[lo, hi]`,
/// with every boundary edge natural.
pub fn square_grid(n: usize, lo: Vec2, hi: Vec2) -> Result<Mesh> {
    check_size(n)?;
    if !(hi.x > lo.x && hi.y > lo.y) {
        return Err(Error::InvalidInput("empty rectangle".into()));
    }
    let grid = Grid { n };
    let step = (hi - lo) / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let x = if i == n { hi.x } else { lo.x + step.x * i as f64 };
            let y = if j == n { hi.y } else { lo.y + step.y * j as f64 };
            vertices.push(Vec2::new(x, y));
        }
    }
    let edges = grid.edges(&vertices, |_, _| None);
    Mesh::from_parts(vertices, edges, grid.cells(), Vec::new())
}

/// Uniform grid on the unit square whose vertices are moved vertically so
/// that the bottom side follows the graph of `g2` and the top side the graph
/// of `g1`:
///
/// `y -> y + g2(x)(1 - 2y)` for `y <= 1/2`, `y -> 1 - y + g1(x)(2y - 1)` otherwise.
///
/// Both curves must be graphs `t -> (t, g(t))` over `[0, 1]`. The top and
/// bottom boundary edges follow the curves exactly.
pub fn deformed_quad_mesh(n: usize, g1: Arc<ParametricCurve>, g2: Arc<ParametricCurve>) -> Result<Mesh> {
    check_size(n)?;
    for g in [&g1, &g2] {
        let (a, b) = g.interval();
        let is_graph = (0..=16).all(|i| {
            let t = i as f64 / 16.0;
            (g.eval(t).x - t).abs() < 1e-14
        });
        if !is_graph || a > 0.0 || b < 1.0 {
            return Err(Error::InvalidInput(format!(
                "curve {} is not a graph over [0, 1]",
                g.name()
            )));
        }
    }
    for i in 0..=64 {
        let x = i as f64 / 64.0;
        if !(g1.eval(x).y > g2.eval(x).y) {
            return Err(Error::InvalidInput(format!("top curve does not lie above bottom curve at x = {x}")));
        }
    }
    let grid = Grid { n };
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let x = i as f64 / n as f64;
            let y = j as f64 / n as f64;
            let y = if 2 * j <= n {
                y + g2.eval(x).y * (1.0 - 2.0 * y)
            } else {
                1.0 - y + g1.eval(x).y * (2.0 * y - 1.0)
            };
            vertices.push(Vec2::new(x, y));
        }
    }
    // The boundary rows lie on the graphs exactly.
    for i in 0..=n {
        let x = i as f64 / n as f64;
        vertices[grid.vertex(i, 0)] = g2.eval(x);
        vertices[grid.vertex(i, n)] = g1.eval(x);
    }
    for j in 0..n {
        for i in 0..n {
            let p = [
                vertices[grid.vertex(i, j)],
                vertices[grid.vertex(i + 1, j)],
                vertices[grid.vertex(i + 1, j + 1)],
                vertices[grid.vertex(i, j + 1)],
            ];
            let doubled: f64 = (0..4).map(|k| cross(p[k], p[(k + 1) % 4])).sum();
            if !(doubled > 0.0) {
                return Err(Error::InvertedCell { cell: j * n + i });
            }
        }
    }
    let edges = grid.edges(&vertices, |i, j| {
        let curve = if j == 0 {
            &g2
        } else if j == n {
            &g1
        } else {
            return None;
        };
        Some(EdgeGeom::Curved {
            curve: curve.clone(),
            t0: i as f64 / n as f64,
            t1: (i + 1) as f64 / n as f64,
            orient: 1,
        })
    });
    Mesh::from_parts(vertices, edges, grid.cells(), vec![g1, g2])
}
