//! Straight and curved edges with arc-length quadrature.

use std::sync::Arc;

use super::curve::ParametricCurve;
use super::quadrature::GaussLegendre;
use super::Vec2;
use crate::error::{Error, Result};

/// Speeds below this are treated as a degenerate parametrization.
pub const MIN_SPEED: f64 = 1e-14;

/// Geometry of a mesh edge, oriented from its first to its second vertex.
///
/// A straight edge is parametrized by the affine map on `[0, h_e]`. A curved
/// edge is the restriction of a shared curve to `[t0, t1]`; `orient = +1`
/// means `gamma(t0)` is the first vertex, `-1` means `gamma(t1)` is.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeGeom {
    Straight {
        p0: Vec2,
        p1: Vec2,
    },
    Curved {
        curve: Arc<ParametricCurve>,
        t0: f64,
        t1: f64,
        orient: i8,
    },
}

/// Local frame at a parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeFrame {
    pub point: Vec2,
    /// Unit tangent in the edge direction (first to second vertex).
    pub tangent: Vec2,
    /// Fixed edge normal: the tangent rotated by -pi/2.
    pub normal: Vec2,
    /// `|gamma'(t)|`.
    pub speed: f64,
}

/// One quadrature node of an edge, in parameter space.
#[derive(Debug, Clone, Copy)]
pub struct EdgeSample {
    pub t: f64,
    pub point: Vec2,
    /// Raw parametric derivative `gamma'(t)`.
    pub velocity: Vec2,
    pub speed: f64,
    /// Quadrature weight for `dt` (multiply by `speed` for arc length).
    pub weight: f64,
}

impl EdgeSample {
    /// Fixed edge normal times arc length element, i.e. `n^e de / dt`.
    pub fn normal_measure(&self, orient: f64) -> Vec2 {
        Vec2::new(self.velocity.y, -self.velocity.x) * orient
    }
}

impl EdgeGeom {
    pub fn straight(p0: Vec2, p1: Vec2) -> Self {
        EdgeGeom::Straight { p0, p1 }
    }

    pub fn is_curved(&self) -> bool {
        matches!(self, EdgeGeom::Curved { .. })
    }

    pub fn curve(&self) -> Option<&Arc<ParametricCurve>> {
        match self {
            EdgeGeom::Curved { curve, .. } => Some(curve),
            EdgeGeom::Straight { .. } => None,
        }
    }

    /// Parameter interval of the edge map.
    pub fn param_interval(&self) -> (f64, f64) {
        match self {
            EdgeGeom::Straight { p0, p1 } => (0.0, (p1 - p0).norm()),
            EdgeGeom::Curved { t0, t1, .. } => (*t0, *t1),
        }
    }

    /// +1 when increasing parameter runs from the first to the second vertex.
    pub fn orientation(&self) -> f64 {
        match self {
            EdgeGeom::Straight { .. } => 1.0,
            EdgeGeom::Curved { orient, .. } => f64::from(*orient),
        }
    }

    pub fn eval(&self, t: f64) -> Vec2 {
        match self {
            EdgeGeom::Straight { p0, p1 } => {
                let h = (p1 - p0).norm();
                p0 + (p1 - p0) * (t / h)
            }
            EdgeGeom::Curved { curve, .. } => curve.eval(t),
        }
    }

    pub fn deriv(&self, t: f64) -> Vec2 {
        match self {
            EdgeGeom::Straight { p0, p1 } => (p1 - p0) / (p1 - p0).norm(),
            EdgeGeom::Curved { curve, .. } => curve.deriv(t),
        }
    }

    /// First vertex position.
    pub fn start(&self) -> Vec2 {
        match self {
            EdgeGeom::Straight { p0, .. } => *p0,
            EdgeGeom::Curved { curve, t0, t1, orient } => {
                curve.eval(if *orient > 0 { *t0 } else { *t1 })
            }
        }
    }

    /// Second vertex position.
    pub fn end(&self) -> Vec2 {
        match self {
            EdgeGeom::Straight { p1, .. } => *p1,
            EdgeGeom::Curved { curve, t0, t1, orient } => {
                curve.eval(if *orient > 0 { *t1 } else { *t0 })
            }
        }
    }

    /// The chord between the two endpoints.
    pub fn straightened(&self) -> EdgeGeom {
        EdgeGeom::Straight {
            p0: self.start(),
            p1: self.end(),
        }
    }

    /// Point, unit tangent, fixed unit normal and speed at parameter `t`.
    pub fn frame(&self, t: f64) -> Result<EdgeFrame> {
        let d = self.deriv(t);
        let speed = d.norm();
        if !(speed >= MIN_SPEED) {
            return Err(Error::DegenerateEdge { speed });
        }
        let tangent = d * (self.orientation() / speed);
        Ok(EdgeFrame {
            point: self.eval(t),
            tangent,
            normal: Vec2::new(tangent.y, -tangent.x),
            speed,
        })
    }

    /// Quadrature nodes of `rule` mapped to the parameter interval.
    pub fn samples(&self, rule: &GaussLegendre) -> Result<Vec<EdgeSample>> {
        let (a, b) = self.param_interval();
        if !(b - a > 0.0) {
            return Err(Error::DegenerateEdge { speed: 0.0 });
        }
        rule.mapped(a, b)
            .map(|(t, w)| {
                let velocity = self.deriv(t);
                let speed = velocity.norm();
                if !(speed >= MIN_SPEED) {
                    return Err(Error::DegenerateEdge { speed });
                }
                Ok(EdgeSample {
                    t,
                    point: self.eval(t),
                    velocity,
                    speed,
                    weight: w,
                })
            })
            .collect()
    }

    /// `int_e f de = int f(gamma(t), t) |gamma'(t)| dt`.
    pub fn integrate(&self, rule: &GaussLegendre, mut f: impl FnMut(Vec2, f64) -> f64) -> Result<f64> {
        Ok(self
            .samples(rule)?
            .iter()
            .map(|s| s.weight * s.speed * f(s.point, s.t))
            .sum())
    }

    /// Arc length `h_e`.
    pub fn length(&self, rule: &GaussLegendre) -> Result<f64> {
        match self {
            EdgeGeom::Straight { p0, p1 } => Ok((p1 - p0).norm()),
            EdgeGeom::Curved { .. } => self.integrate(rule, |_, _| 1.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curve::CurveKind;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn circle(r: f64) -> Arc<ParametricCurve> {
        Arc::new(
            ParametricCurve::new(
                "c",
                CurveKind::Circle {
                    center: Vec2::zeros(),
                    radius: r,
                },
                (0.0, TAU),
            )
            .unwrap(),
        )
    }

    #[test]
    fn straight_frame() {
        let e = EdgeGeom::straight(Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0));
        let f = e.frame(1.0).unwrap();
        assert_eq!(f.point, Vec2::new(1.0, 0.0));
        assert_eq!(f.tangent, Vec2::new(1.0, 0.0));
        assert_eq!(f.normal, Vec2::new(0.0, -1.0));
        assert_eq!(f.speed, 1.0);
    }

    #[test]
    fn circle_frame() {
        let e = EdgeGeom::Curved {
            curve: circle(0.45),
            t0: -0.5,
            t1: 0.5,
            orient: 1,
        };
        let f = e.frame(0.0).unwrap();
        assert!((f.point - Vec2::new(0.45, 0.0)).norm() < 1e-15);
        assert!((f.tangent - Vec2::new(0.0, 1.0)).norm() < 1e-15);
        assert!((f.normal - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        assert!((f.speed - 0.45).abs() < 1e-15);
    }

    #[test]
    fn graph_frame_speed() {
        let g = Arc::new(
            ParametricCurve::new(
                "g1",
                CurveKind::PolynomialGraph {
                    coeffs: vec![1.0, 0.0, -0.5, 0.5],
                },
                (0.0, 1.0),
            )
            .unwrap(),
        );
        let e = EdgeGeom::Curved {
            curve: g,
            t0: 0.0,
            t1: 0.5,
            orient: 1,
        };
        let f = e.frame(0.0).unwrap();
        assert!((f.speed - 1.0).abs() < 1e-15);
        assert!((f.point - Vec2::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_edge_is_rejected() {
        let e = EdgeGeom::Curved {
            curve: Arc::new(
                ParametricCurve::new(
                    "p",
                    CurveKind::Segment {
                        start: Vec2::new(1.0, 1.0),
                        end: Vec2::new(1.0, 1.0),
                    },
                    (0.0, 1.0),
                )
                .unwrap(),
            ),
            t0: 0.0,
            t1: 1.0,
            orient: 1,
        };
        assert!(matches!(e.frame(0.5), Err(Error::DegenerateEdge { .. })));
    }

    #[test]
    fn arc_length_integrals() {
        let rule = GaussLegendre::new(8);
        let s = EdgeGeom::straight(Vec2::new(0.1, 0.2), Vec2::new(0.1, 0.5));
        assert!((s.integrate(&rule, |_, _| 1.0).unwrap() - 0.3).abs() < 1e-15);
        let q = EdgeGeom::Curved {
            curve: circle(0.45),
            t0: 0.0,
            t1: FRAC_PI_2,
            orient: 1,
        };
        assert!((q.length(&rule).unwrap() - 0.45 * FRAC_PI_2).abs() < 1e-14);
        let x = EdgeGeom::straight(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0));
        assert!((x.integrate(&rule, |p, _| p.x).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reversed_orientation_flips_normal() {
        let fwd = EdgeGeom::Curved {
            curve: circle(1.0),
            t0: 0.0,
            t1: 1.0,
            orient: 1,
        };
        let rev = EdgeGeom::Curved {
            curve: circle(1.0),
            t0: 0.0,
            t1: 1.0,
            orient: -1,
        };
        let a = fwd.frame(0.3).unwrap();
        let b = rev.frame(0.3).unwrap();
        assert!((a.normal + b.normal).norm() < 1e-15);
        assert!((fwd.start() - rev.end()).norm() < 1e-15);
    }
}
