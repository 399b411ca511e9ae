//! Parametric curves used for curved mesh edges.

use std::f64::consts::TAU;
use std::sync::Arc;

use super::{cross, Vec2};
use crate::error::{Error, Result};

/// The analytic families a curve can belong to. All of them can be written
/// to and read back from a mesh file.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    /// Graph `t -> (t, sum_i c_i t^i)`.
    PolynomialGraph { coeffs: Vec<f64> },
    /// Graph `t -> (t, a sin(w t + phi) + b)`.
    SineGraph {
        amplitude: f64,
        frequency: f64,
        phase: f64,
        offset: f64,
    },
    /// Counterclockwise circle `t -> c + r (cos t, sin t)`; periodic in `t`.
    Circle { center: Vec2, radius: f64 },
    /// Affine map `t -> start + t (end - start)`.
    Segment { start: Vec2, end: Vec2 },
    /// Concatenation of previously defined curves; piece `i` occupies a
    /// parameter window as long as its own interval.
    Composite { pieces: Vec<Arc<ParametricCurve>> },
}

/// A named, regular parametrization `gamma: [a, b] -> R^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCurve {
    name: String,
    kind: CurveKind,
    interval: (f64, f64),
}

impl ParametricCurve {
    pub fn new(name: impl Into<String>, kind: CurveKind, interval: (f64, f64)) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidInput(format!("invalid curve name {name:?}")));
        }
        let (a, b) = interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInput(format!(
                "curve {name}: parameter interval [{a}, {b}] is empty"
            )));
        }
        match &kind {
            CurveKind::Circle { radius, .. } if !(*radius > 0.0) => {
                return Err(Error::InvalidInput(format!("curve {name}: radius must be positive")))
            }
            CurveKind::Composite { pieces } if pieces.is_empty() => {
                return Err(Error::InvalidInput(format!("curve {name}: composite without pieces")))
            }
            CurveKind::Composite { pieces } => {
                let total: f64 = pieces.iter().map(|p| p.interval.1 - p.interval.0).sum();
                if ((b - a) - total).abs() > 1e-12 * total.max(1.0) {
                    return Err(Error::InvalidInput(format!(
                        "curve {name}: composite interval length {} differs from pieces {total}",
                        b - a
                    )));
                }
            }
            _ => {}
        }
        Ok(Self { name, kind, interval })
    }

    /// Composite curve over `[0, sum of piece lengths]`.
    pub fn composite(name: impl Into<String>, pieces: Vec<Arc<ParametricCurve>>) -> Result<Self> {
        let total: f64 = pieces.iter().map(|p| p.interval.1 - p.interval.0).sum();
        Self::new(name, CurveKind::Composite { pieces }, (0.0, total))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    /// Coarse classification used in reports.
    pub fn kind_tag(&self) -> &'static str {
        match self.kind {
            CurveKind::PolynomialGraph { .. } | CurveKind::SineGraph { .. } => "analytic-graph",
            CurveKind::Circle { .. } => "circle-arc",
            CurveKind::Segment { .. } => "affine-segment",
            CurveKind::Composite { .. } => "composite",
        }
    }

    /// Period of the parametrization, if it is periodic. Periodic curves may be
    /// evaluated outside their nominal interval.
    pub fn period(&self) -> Option<f64> {
        match self.kind {
            CurveKind::Circle { .. } => Some(TAU),
            _ => None,
        }
    }

    /// True when `gamma(a) == gamma(b)` up to roundoff.
    pub fn is_closed(&self) -> bool {
        let (a, b) = self.interval;
        let scale = self.eval(a).norm().max(1.0);
        (self.eval(a) - self.eval(b)).norm() <= 1e-12 * scale
    }

    pub fn eval(&self, t: f64) -> Vec2 {
        match &self.kind {
            CurveKind::PolynomialGraph { coeffs } => Vec2::new(t, horner(coeffs, t)),
            CurveKind::SineGraph {
                amplitude,
                frequency,
                phase,
                offset,
            } => Vec2::new(t, amplitude * (frequency * t + phase).sin() + offset),
            CurveKind::Circle { center, radius } => {
                let (s, c) = t.sin_cos();
                center + Vec2::new(c, s) * *radius
            }
            CurveKind::Segment { start, end } => start + (end - start) * t,
            CurveKind::Composite { pieces } => {
                let (piece, local) = self.locate(pieces, t);
                piece.eval(local)
            }
        }
    }

    /// Derivative `gamma'(t)`.
    pub fn deriv(&self, t: f64) -> Vec2 {
        match &self.kind {
            CurveKind::PolynomialGraph { coeffs } => {
                let mut acc = 0.0;
                let mut pw = 1.0;
                for (i, &c) in coeffs.iter().enumerate().skip(1) {
                    acc += c * i as f64 * pw;
                    pw *= t;
                }
                Vec2::new(1.0, acc)
            }
            CurveKind::SineGraph {
                amplitude,
                frequency,
                phase,
                ..
            } => Vec2::new(1.0, amplitude * frequency * (frequency * t + phase).cos()),
            CurveKind::Circle { radius, .. } => {
                let (s, c) = t.sin_cos();
                Vec2::new(-s, c) * *radius
            }
            CurveKind::Segment { start, end } => end - start,
            CurveKind::Composite { pieces } => {
                let (piece, local) = self.locate(pieces, t);
                piece.deriv(local)
            }
        }
    }

    fn locate<'a>(&self, pieces: &'a [Arc<ParametricCurve>], t: f64) -> (&'a ParametricCurve, f64) {
        let mut offset = self.interval.0;
        for (i, piece) in pieces.iter().enumerate() {
            let (a, b) = piece.interval;
            let len = b - a;
            if t <= offset + len || i + 1 == pieces.len() {
                return (piece, a + (t - offset));
            }
            offset += len;
        }
        unreachable!("composite curves have at least one piece")
    }

    /// `n + 1` equispaced samples `(t, gamma(t))` over `[t0, t1]`.
    pub fn sample(&self, t0: f64, t1: f64, n: usize) -> Vec<(f64, Vec2)> {
        (0..=n)
            .map(|i| {
                let t = t0 + (t1 - t0) * i as f64 / n as f64;
                (t, self.eval(t))
            })
            .collect()
    }

    /// Parameter of the point of the curve closest to `x` (local search seeded
    /// from a dense sampling of the nominal interval).
    pub fn closest_parameter(&self, x: Vec2) -> f64 {
        let (a, b) = self.interval;
        let samples = self.sample(a, b, 2048);
        let mut best = samples
            .iter()
            .min_by(|p, q| (p.1 - x).norm_squared().total_cmp(&(q.1 - x).norm_squared()))
            .map(|p| p.0)
            .unwrap_or(a);
        let h = 1e-6 * (b - a);
        for _ in 0..20 {
            let g = |t: f64| (self.eval(t) - x).dot(&self.deriv(t));
            let g0 = g(best);
            let dg = (g(best + h) - g(best - h)) / (2.0 * h);
            if dg <= 0.0 {
                break;
            }
            let step = g0 / dg;
            let next = if self.period().is_some() {
                best - step
            } else {
                (best - step).clamp(a, b)
            };
            if (next - best).abs() < 1e-15 * (b - a) {
                best = next;
                break;
            }
            best = next;
        }
        best
    }

    /// Implicit description `phi(x)` of the curve with its gradient: zero on
    /// the curve, positive to the left of the direction of travel. `None` for
    /// composite curves.
    pub fn level_set(&self, x: Vec2) -> Option<(f64, Vec2)> {
        match &self.kind {
            CurveKind::PolynomialGraph { .. } | CurveKind::SineGraph { .. } => {
                let g = self.eval(x.x).y;
                let dg = self.deriv(x.x).y;
                Some((x.y - g, Vec2::new(-dg, 1.0)))
            }
            CurveKind::Circle { center, radius } => {
                let d = x - center;
                let r = d.norm();
                let grad = if r > 0.0 { -d / r } else { Vec2::zeros() };
                Some((radius - r, grad))
            }
            CurveKind::Segment { start, end } => {
                let dir = end - start;
                let len = dir.norm();
                Some((cross(dir, x - start) / len, Vec2::new(-dir.y, dir.x) / len))
            }
            CurveKind::Composite { .. } => None,
        }
    }

    /// Parameter of a point known to lie on the curve.
    pub fn parameter_of(&self, x: Vec2) -> f64 {
        match &self.kind {
            CurveKind::PolynomialGraph { .. } | CurveKind::SineGraph { .. } => x.x,
            CurveKind::Circle { center, .. } => {
                let t = (x.y - center.y).atan2(x.x - center.x);
                let a = self.interval.0;
                a + (t - a).rem_euclid(TAU)
            }
            CurveKind::Segment { start, end } => {
                let dir = end - start;
                (x - start).dot(&dir) / dir.norm_squared()
            }
            CurveKind::Composite { .. } => self.closest_parameter(x),
        }
    }

    /// Positive when `x` lies to the left of the curve's direction of travel
    /// (the interior, for a counterclockwise closed curve), negative on the
    /// right.
    pub fn side_of(&self, x: Vec2) -> f64 {
        if let Some((phi, _)) = self.level_set(x) {
            return phi;
        }
        if self.is_closed() || self.period().is_some() {
            let (a, b) = match self.period() {
                Some(p) => (self.interval.0, self.interval.0 + p),
                None => self.interval,
            };
            let pts = self.sample(a, b, 4096);
            let mut winding = 0.0;
            for w in pts.windows(2) {
                let u = w[0].1 - x;
                let v = w[1].1 - x;
                winding += cross(u, v).atan2(u.dot(&v));
            }
            // winding / 2pi is +1 inside a counterclockwise loop.
            if winding > std::f64::consts::PI {
                1.0
            } else {
                -1.0
            }
        } else {
            let t = self.closest_parameter(x);
            cross(self.deriv(t), x - self.eval(t))
        }
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn curves() -> Vec<ParametricCurve> {
        let cubic = ParametricCurve::new(
            "g2",
            CurveKind::PolynomialGraph {
                coeffs: vec![0.0, 0.0, -0.5, 0.5],
            },
            (0.0, 1.0),
        )
        .unwrap();
        let sine = ParametricCurve::new(
            "s",
            CurveKind::SineGraph {
                amplitude: 0.2,
                frequency: std::f64::consts::PI,
                phase: 0.0,
                offset: 0.31,
            },
            (-1.0, 1.0),
        )
        .unwrap();
        let circle = ParametricCurve::new(
            "c",
            CurveKind::Circle {
                center: Vec2::new(0.1, -0.2),
                radius: 0.45,
            },
            (0.0, TAU),
        )
        .unwrap();
        let seg = ParametricCurve::new(
            "l",
            CurveKind::Segment {
                start: Vec2::new(0.0, 0.0),
                end: Vec2::new(1.0, 2.0),
            },
            (0.0, 1.0),
        )
        .unwrap();
        let comp = ParametricCurve::composite("cc", vec![Arc::new(seg.clone()), Arc::new(cubic.clone())]).unwrap();
        vec![cubic, sine, circle, seg, comp]
    }

    #[test]
    fn derivative_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for c in curves() {
            let (a, b) = c.interval();
            for _ in 0..10 {
                let t = rng.random_range(a + 0.01..b - 0.01);
                let h = 1e-6;
                let fd = (c.eval(t + h) - c.eval(t - h)) / (2.0 * h);
                let d = c.deriv(t);
                assert!((fd - d).norm() <= 1e-6 * d.norm().max(1.0), "{}: {fd} vs {d}", c.name());
                assert!(d.norm() > 0.0);
            }
        }
    }

    #[test]
    fn circle_closed_and_sides() {
        let c = &curves()[2];
        assert!(c.is_closed());
        assert!(c.side_of(Vec2::new(0.1, -0.2)) > 0.0);
        assert!(c.side_of(Vec2::new(0.9, 0.9)) < 0.0);
    }

    #[test]
    fn graph_sides() {
        let s = &curves()[1];
        assert!(s.side_of(Vec2::new(0.3, 0.9)) > 0.0);
        assert!(s.side_of(Vec2::new(0.3, 0.0)) < 0.0);
        assert!(!s.is_closed());
    }

    #[test]
    fn level_set_vanishes_on_curve_and_inverts_parameter() {
        for c in curves().iter().take(4) {
            let (a, b) = c.interval();
            for i in 1..10 {
                let t = a + (b - a) * i as f64 / 10.0;
                let x = c.eval(t);
                let (phi, grad) = c.level_set(x).unwrap();
                assert!(phi.abs() < 1e-14, "{}: {phi}", c.name());
                assert!(grad.dot(&c.deriv(t)).abs() < 1e-13);
                assert!((c.parameter_of(x) - t).abs() < 1e-13);
            }
        }
        assert!(curves()[4].level_set(Vec2::zeros()).is_none());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ParametricCurve::new("x", CurveKind::Circle { center: Vec2::zeros(), radius: 0.0 }, (0.0, 1.0)).is_err());
        assert!(ParametricCurve::new("x y", CurveKind::Circle { center: Vec2::zeros(), radius: 1.0 }, (0.0, 1.0)).is_err());
        assert!(ParametricCurve::new("x", CurveKind::Circle { center: Vec2::zeros(), radius: 1.0 }, (1.0, 1.0)).is_err());
    }

    #[test]
    fn composite_is_continuous() {
        let comp = &curves()[4];
        let l = comp.eval(1.0 - 1e-12);
        let r = comp.eval(1.0 + 1e-12);
        // segment ends at (1, 2), cubic starts at (0, 0): pieces need not join,
        // but locating must be consistent on each side.
        assert!((l - Vec2::new(1.0, 2.0)).norm() < 1e-10);
        assert!(r.norm() < 1e-10);
    }
}
