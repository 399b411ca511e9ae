//! Integration over curved polygons described by their oriented boundary.

use super::edge::EdgeGeom;
use super::quadrature::GaussLegendre;
use super::{cross, Vec2};
use crate::error::{Error, Result};
use crate::poly::{monomial_exponents, monomial_index, poly_dim};

/// An edge as seen from a cell: `sigma = +1` when the cell boundary runs from
/// the edge's first to its second vertex.
#[derive(Debug, Clone, Copy)]
pub struct OrientedEdge<'a> {
    pub geom: &'a EdgeGeom,
    pub sigma: i8,
}

impl<'a> OrientedEdge<'a> {
    pub fn new(geom: &'a EdgeGeom, sigma: i8) -> Self {
        Self { geom, sigma }
    }

    /// +1 when the cell traverses the edge in increasing parameter.
    pub fn traversal(&self) -> f64 {
        f64::from(self.sigma) * self.geom.orientation()
    }

    pub fn from_point(&self) -> Vec2 {
        if self.sigma > 0 {
            self.geom.start()
        } else {
            self.geom.end()
        }
    }

    pub fn to_point(&self) -> Vec2 {
        if self.sigma > 0 {
            self.geom.end()
        } else {
            self.geom.start()
        }
    }
}

/// Area, centroid and diameter of a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMeasures {
    pub area: f64,
    pub centroid: Vec2,
    pub diameter: f64,
}

/// Which primitive of the integrand carries the divergence-theorem reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primitive {
    X,
    Y,
}

/// `int_E ((x - x_E)/h)^a ((y - y_E)/h)^b dE` for all `a + b <= degree`,
/// indexed in graded-lex order.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialTable {
    degree: usize,
    values: Vec<f64>,
}

impl MonomialTable {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        debug_assert!(a + b <= self.degree);
        self.values[monomial_index(a, b)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Largest distance between the end of one boundary edge and the start of the
/// edge that follows it. Boundaries made of several loops are matched up
/// greedily.
pub fn loop_gap(boundary: &[OrientedEdge]) -> f64 {
    let n = boundary.len();
    if n == 0 {
        return f64::INFINITY;
    }
    let mut used = vec![false; n];
    let mut worst: f64 = 0.0;
    for e in boundary {
        let end = e.to_point();
        let mut best = (f64::INFINITY, usize::MAX);
        for (j, f) in boundary.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (f.from_point() - end).norm();
            if d < best.0 {
                best = (d, j);
            }
        }
        if best.1 == usize::MAX {
            return f64::INFINITY;
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    worst
}

fn boundary_points(boundary: &[OrientedEdge], sampling: &GaussLegendre) -> Result<Vec<Vec2>> {
    let mut pts = Vec::new();
    for e in boundary {
        pts.push(e.from_point());
        if e.geom.is_curved() {
            pts.extend(e.geom.samples(sampling)?.iter().map(|s| s.point));
        }
    }
    Ok(pts)
}

/// Area, centroid and diameter. The diameter is the largest distance between
/// vertices and five interior points per curved edge.
pub fn element_measures(boundary: &[OrientedEdge], rule: &GaussLegendre) -> Result<CellMeasures> {
    let pts = boundary_points(boundary, &GaussLegendre::new(5))?;
    let mut diameter: f64 = 0.0;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            diameter = diameter.max((p - q).norm());
        }
    }
    let gap = loop_gap(boundary);
    if !(gap <= 1e-12 * diameter) {
        return Err(Error::OpenLoop { gap });
    }
    let origin = boundary[0].from_point();
    let (mut area, mut mx, mut my) = (0.0, 0.0, 0.0);
    for e in boundary {
        let dir = e.traversal();
        for s in e.geom.samples(rule)? {
            let x = s.point.x - origin.x;
            let y = s.point.y - origin.y;
            let dy = dir * s.velocity.y * s.weight;
            area += x * dy;
            mx += 0.5 * x * x * dy;
            my += x * y * dy;
        }
    }
    if !(area > 0.0) {
        return Err(Error::NegativeArea { area });
    }
    Ok(CellMeasures {
        area,
        centroid: origin + Vec2::new(mx, my) / area,
        diameter,
    })
}

/// Integrals of all scaled monomials up to `degree` via the divergence
/// theorem, using the primitive in `x` (or in `y`).
pub fn monomial_integrals(
    boundary: &[OrientedEdge],
    center: Vec2,
    scale: f64,
    degree: usize,
    rule: &GaussLegendre,
    primitive: Primitive,
) -> Result<MonomialTable> {
    let mut values = vec![0.0; poly_dim(degree)];
    let mut xp = vec![0.0; degree + 2];
    let mut yp = vec![0.0; degree + 2];
    for e in boundary {
        let dir = e.traversal();
        for s in e.geom.samples(rule)? {
            let xi = (s.point.x - center.x) / scale;
            let eta = (s.point.y - center.y) / scale;
            xp[0] = 1.0;
            yp[0] = 1.0;
            for i in 1..degree + 2 {
                xp[i] = xp[i - 1] * xi;
                yp[i] = yp[i - 1] * eta;
            }
            let w = dir * s.weight * scale;
            match primitive {
                Primitive::X => {
                    let dy = w * s.velocity.y;
                    for (idx, v) in values.iter_mut().enumerate() {
                        let (a, b) = monomial_exponents(idx);
                        *v += xp[a + 1] * yp[b] / (a + 1) as f64 * dy;
                    }
                }
                Primitive::Y => {
                    let dx = w * s.velocity.x;
                    for (idx, v) in values.iter_mut().enumerate() {
                        let (a, b) = monomial_exponents(idx);
                        *v -= xp[a] * yp[b + 1] / (b + 1) as f64 * dx;
                    }
                }
            }
        }
    }
    Ok(MonomialTable { degree, values })
}

/// `int_E ((x - x_E)/h)^a ((y - y_E)/h)^b dE`.
pub fn element_monomial_integral(
    boundary: &[OrientedEdge],
    center: Vec2,
    scale: f64,
    exponents: (usize, usize),
    rule: &GaussLegendre,
) -> Result<f64> {
    let gap = loop_gap(boundary);
    let diam = boundary_points(boundary, &GaussLegendre::new(2))?
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .fold(0.0, f64::max)
        .max(scale);
    if !(gap <= 1e-12 * diam) {
        return Err(Error::OpenLoop { gap });
    }
    let (a, b) = exponents;
    let table = monomial_integrals(boundary, center, scale, a + b, rule, Primitive::X)?;
    Ok(table.get(a, b))
}

/// Quadrature points and weights of a fan of curved triangles
/// `{star + tau (gamma(s) - star)}` covering the cell.
///
/// With `require_star = true` a negative Jacobian at any node is reported as
/// [`Error::StarPointInvalid`]; otherwise the signed fan is returned as is,
/// which still integrates correctly for integrands that are smooth across the
/// swept region.
pub fn fan_quadrature(
    boundary: &[OrientedEdge],
    star: Vec2,
    rule: &GaussLegendre,
    require_star: bool,
) -> Result<Vec<(Vec2, f64)>> {
    let radial: Vec<(f64, f64)> = rule.mapped(0.0, 1.0).collect();
    let mut out = Vec::with_capacity(boundary.len() * rule.len() * rule.len());
    for e in boundary {
        let dir = e.traversal();
        for s in e.geom.samples(rule)? {
            let arm = s.point - star;
            let jac = dir * cross(arm, s.velocity);
            if require_star && jac < -1e-12 * arm.norm() * s.speed {
                return Err(Error::StarPointInvalid);
            }
            for &(tau, wt) in &radial {
                out.push((star + arm * tau, s.weight * wt * tau * jac));
            }
        }
    }
    Ok(out)
}

/// Whether every boundary node (of `rule`, plus the vertices) is seen from
/// `star` with a non-negative fan Jacobian.
pub fn is_star_point(boundary: &[OrientedEdge], star: Vec2, rule: &GaussLegendre) -> Result<bool> {
    for e in boundary {
        let dir = e.traversal();
        let (a, b) = e.geom.param_interval();
        let ends = [a, b].map(|t| (e.geom.eval(t), e.geom.deriv(t)));
        let inner: Vec<(Vec2, Vec2)> = e.geom.samples(rule)?.iter().map(|s| (s.point, s.velocity)).collect();
        for (p, v) in ends.iter().chain(inner.iter()) {
            let arm = p - star;
            if dir * cross(arm, *v) < -1e-12 * arm.norm() * v.norm() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `int_E f dE` by tensor Gauss quadrature with `order` points per direction
/// on each curved triangle of the fan from `star`.
pub fn element_bulk_integral(
    boundary: &[OrientedEdge],
    mut f: impl FnMut(Vec2) -> f64,
    order: usize,
    star: Vec2,
) -> Result<f64> {
    let rule = GaussLegendre::new(order);
    Ok(fan_quadrature(boundary, star, &rule, true)?
        .into_iter()
        .map(|(x, w)| w * f(x))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curve::{CurveKind, ParametricCurve};
    use std::f64::consts::{PI, TAU};
    use std::sync::Arc;

    fn polygon(pts: &[(f64, f64)]) -> Vec<EdgeGeom> {
        (0..pts.len())
            .map(|i| {
                let a = pts[i];
                let b = pts[(i + 1) % pts.len()];
                EdgeGeom::straight(Vec2::new(a.0, a.1), Vec2::new(b.0, b.1))
            })
            .collect()
    }

    fn oriented(edges: &[EdgeGeom]) -> Vec<OrientedEdge<'_>> {
        edges.iter().map(|e| OrientedEdge::new(e, 1)).collect()
    }

    fn half_disk(r: f64) -> Vec<EdgeGeom> {
        let c = Arc::new(
            ParametricCurve::new(
                "c",
                CurveKind::Circle {
                    center: Vec2::zeros(),
                    radius: r,
                },
                (0.0, TAU),
            )
            .unwrap(),
        );
        vec![
            EdgeGeom::straight(Vec2::new(-r, 0.0), Vec2::new(r, 0.0)),
            EdgeGeom::Curved {
                curve: c,
                t0: 0.0,
                t1: PI,
                orient: 1,
            },
        ]
    }

    #[test]
    fn unit_square_measures() {
        let sq = polygon(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let b = oriented(&sq);
        let rule = GaussLegendre::new(4);
        let m = element_measures(&b, &rule).unwrap();
        assert!((m.area - 1.0).abs() < 1e-15);
        assert!((m.centroid - Vec2::new(0.5, 0.5)).norm() < 1e-15);
        assert!((m.diameter - 2f64.sqrt()).abs() < 1e-15);
        let i0 = element_monomial_integral(&b, m.centroid, m.diameter, (0, 0), &rule).unwrap();
        let i1 = element_monomial_integral(&b, m.centroid, m.diameter, (1, 0), &rule).unwrap();
        assert!((i0 - 1.0).abs() < 1e-15);
        assert!(i1.abs() < 1e-15);
        let bulk = element_bulk_integral(&b, |p| p.x * p.x + p.y * p.y, 4, m.centroid).unwrap();
        assert!((bulk - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn triangle_measures() {
        let tri = polygon(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        let m = element_measures(&oriented(&tri), &GaussLegendre::new(3)).unwrap();
        assert!((m.area - 0.5).abs() < 1e-15);
        assert!((m.centroid - Vec2::new(1.0 / 3.0, 1.0 / 3.0)).norm() < 1e-15);
        assert!((m.diameter - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn clockwise_loop_is_negative() {
        let sq = polygon(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]);
        assert!(matches!(
            element_measures(&oriented(&sq), &GaussLegendre::new(3)),
            Err(Error::NegativeArea { .. })
        ));
    }

    #[test]
    fn open_loop_is_rejected() {
        let mut sq = polygon(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        sq.pop();
        assert!(matches!(
            element_measures(&oriented(&sq), &GaussLegendre::new(3)),
            Err(Error::OpenLoop { .. })
        ));
    }

    #[test]
    fn half_disk_area_agrees_between_routes() {
        let r = 0.45;
        let hd = half_disk(r);
        let b = oriented(&hd);
        let rule = GaussLegendre::new(12);
        let m = element_measures(&b, &rule).unwrap();
        let exact = PI * r * r / 2.0;
        assert!((m.area - exact).abs() < 1e-12 * exact);
        let mono = element_monomial_integral(&b, m.centroid, m.diameter, (0, 0), &rule).unwrap();
        let bulk = element_bulk_integral(&b, |_| 1.0, 12, m.centroid).unwrap();
        assert!((mono - bulk).abs() < 1e-12 * exact);
        // centroid of a half disk: (0, 4r / 3pi)
        assert!((m.centroid - Vec2::new(0.0, 4.0 * r / (3.0 * PI))).norm() < 1e-12);
        assert!((m.diameter - 2.0 * r).abs() < 1e-15);
    }

    #[test]
    fn full_disk_from_two_arcs() {
        let r = 0.3;
        let c = Arc::new(
            ParametricCurve::new(
                "c",
                CurveKind::Circle {
                    center: Vec2::new(1.0, 2.0),
                    radius: r,
                },
                (0.0, TAU),
            )
            .unwrap(),
        );
        let arcs = [
            EdgeGeom::Curved { curve: c.clone(), t0: 0.0, t1: PI, orient: 1 },
            EdgeGeom::Curved { curve: c, t0: PI, t1: TAU, orient: 1 },
        ];
        let m = element_measures(&oriented(&arcs), &GaussLegendre::new(16)).unwrap();
        assert!((m.area - PI * r * r).abs() < 1e-13);
        assert!((m.centroid - Vec2::new(1.0, 2.0)).norm() < 1e-13);
        assert!((m.diameter - 2.0 * r).abs() < 1e-3 * r);
    }

    #[test]
    fn star_point_detection() {
        // L-shaped hexagon: a point in the horizontal arm cannot see the vertical arm.
        let l = polygon(&[(0.0, 0.0), (2.0, 0.0), (2.0, 0.2), (0.2, 0.2), (0.2, 2.0), (0.0, 2.0)]);
        let b = oriented(&l);
        let rule = GaussLegendre::new(4);
        assert!(is_star_point(&b, Vec2::new(0.1, 0.1), &rule).unwrap());
        assert!(!is_star_point(&b, Vec2::new(1.5, 0.15), &rule).unwrap());
        assert!(matches!(
            element_bulk_integral(&b, |_| 1.0, 4, Vec2::new(1.5, 0.15)),
            Err(Error::StarPointInvalid)
        ));
        // The signed fan is still exact for polynomials.
        let signed: f64 = fan_quadrature(&b, Vec2::new(1.5, 0.15), &rule, false)
            .unwrap()
            .iter()
            .map(|(_, w)| w)
            .sum();
        assert!((signed - (0.4 + 0.36)).abs() < 1e-14);
    }

    #[test]
    fn primitives_agree() {
        let hd = half_disk(0.7);
        let b = oriented(&hd);
        let rule = GaussLegendre::new(16);
        let m = element_measures(&b, &rule).unwrap();
        let tx = monomial_integrals(&b, m.centroid, m.diameter, 6, &rule, Primitive::X).unwrap();
        let ty = monomial_integrals(&b, m.centroid, m.diameter, 6, &rule, Primitive::Y).unwrap();
        for (x, y) in tx.values().iter().zip(ty.values()) {
            assert!((x - y).abs() <= 1e-12 * tx.get(0, 0), "{x} vs {y}");
        }
    }
}
