//! Helpers shared by the integration tests: random cells and fields and an
//! independent quadrature oracle.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use curvem::geometry::{CurveKind, EdgeGeom, OrientedEdge, ParametricCurve, Vec2};
use rand::Rng;

/// Gauss-Legendre nodes and weights on `[0, 1]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if n == 0 { 1.0 } else { p1 };
                dp = n as f64 * (x * p - p0) / (x * x - 1.0);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            (0.5 * (1.0 + x), 0.5 * w)
        })
        .collect()
}

/// `int_E xi^a eta^b` with `xi = (x - c) / h` by a fan of curved triangles
/// from `c`, using 24-point rules in both directions.
pub fn oracle_monomial_integral(boundary: &[OrientedEdge], c: Vec2, h: f64, a: usize, b: usize) -> f64 {
    let rule = gauss_legendre_unit(24);
    let mut sum = 0.0;
    for e in boundary {
        let (t0, t1) = e.geom.param_interval();
        for &(s, ws) in &rule {
            let t = t0 + (t1 - t0) * s;
            let p = e.geom.eval(t);
            let v = e.geom.deriv(t) * (t1 - t0);
            let arm = p - c;
            let jac = (arm.x * v.y - arm.y * v.x) * e.traversal();
            for &(tau, wt) in &rule {
                let x = arm * tau / h;
                sum += ws * wt * tau * jac * x.x.powi(a as i32) * x.y.powi(b as i32);
            }
        }
    }
    sum
}

fn arc(from: Vec2, to: Vec2, sagitta: f64, name: &str) -> EdgeGeom {
    let chord = to - from;
    let len = chord.norm();
    let out = Vec2::new(chord.y, -chord.x) / len;
    let radius = (len * len / 4.0 + sagitta * sagitta) / (2.0 * sagitta.abs());
    let apex = (from + to) * 0.5 + out * sagitta;
    let center = apex - out * sagitta.signum() * radius;
    let angle = |p: Vec2| (p.y - center.y).atan2(p.x - center.x);
    let curve = Arc::new(
        ParametricCurve::new(name, CurveKind::Circle { center, radius }, (0.0, TAU)).expect("valid circle"),
    );
    let (a0, a1) = (angle(from), angle(to));
    let ccw = a0 + (a1 - a0).rem_euclid(TAU);
    let mid = curve.eval(0.5 * (a0 + ccw));
    if (mid - apex).norm() < 1e-9 * radius.max(1.0) {
        EdgeGeom::Curved { curve, t0: a0, t1: ccw, orient: 1 }
    } else {
        let back = a1 + (a0 - a1).rem_euclid(TAU);
        EdgeGeom::Curved { curve, t0: a1, t1: back, orient: -1 }
    }
}

/// A counterclockwise polygon with 3 to 7 vertices, star-shaped about its
/// center. With `curved`, one or two edges are replaced by circular arcs
/// bulging in or out.
pub fn random_cell(rng: &mut impl Rng, curved: bool) -> Vec<EdgeGeom> {
    let n = rng.random_range(3..=7);
    let center = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let size = rng.random_range(0.05..0.4);
    let offset = rng.random_range(0.0..TAU);
    let pts: Vec<Vec2> = (0..n)
        .map(|i| {
            let t = offset + TAU * (i as f64 + rng.random_range(-0.2..0.2)) / n as f64;
            center + Vec2::new(t.cos(), t.sin()) * size * rng.random_range(0.8..1.2)
        })
        .collect();
    let bent: Vec<usize> = if curved {
        (0..rng.random_range(1..=2)).map(|_| rng.random_range(0..n)).collect()
    } else {
        Vec::new()
    };
    (0..n)
        .map(|i| {
            let (p, q) = (pts[i], pts[(i + 1) % n]);
            if bent.contains(&i) {
                let len = (q - p).norm();
                let s = if rng.random_bool(0.7) {
                    rng.random_range(0.05..0.3) * len
                } else {
                    -rng.random_range(0.03..0.08) * len
                };
                arc(p, q, s, &format!("arc{i}"))
            } else {
                EdgeGeom::straight(p, q)
            }
        })
        .collect()
}

pub type Field = (Box<dyn Fn(Vec2) -> Vec2>, Box<dyn Fn(Vec2) -> f64>);

/// `w = (A sin(u.x + phi), B cos(v.x + psi))` with its divergence.
pub fn random_field(rng: &mut impl Rng) -> Field {
    let a = rng.random_range(-2.0..2.0);
    let b = rng.random_range(-2.0..2.0);
    let u = Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    let v = Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    let phi = rng.random_range(0.0..TAU);
    let psi = rng.random_range(0.0..TAU);
    let w = move |x: Vec2| Vec2::new(a * (u.dot(&x) + phi).sin(), b * (v.dot(&x) + psi).cos());
    let div = move |x: Vec2| a * u.x * (u.dot(&x) + phi).cos() - b * v.y * (v.dot(&x) + psi).sin();
    (Box::new(w), Box::new(div))
}

#[test]
fn oracle_rule_integrates_polynomials() {
    let rule = gauss_legendre_unit(5);
    let integral: f64 = rule.iter().map(|(x, w)| w * x.powi(9)).sum();
    assert!((integral - 0.1).abs() < 1e-15);
}
