//! Manufactured solutions with their meshes.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::geometry::{CurveKind, ParametricCurve, Vec2};
use crate::mesh::{cut_mesh_with_curve, deformed_quad_mesh, square_grid, Mesh};
use crate::poly::{monomial_exponents, poly_dim};
use crate::solver::DarcyProblem;

/// A Darcy problem with known pressure and velocity in every region.
pub trait ManufacturedCase: DarcyProblem {
    fn name(&self) -> &str;

    fn pressure(&self, region: usize, x: Vec2) -> f64;

    fn velocity(&self, region: usize, x: Vec2) -> Vec2;

    /// Mesh of the exact geometry built from an `n x n` background grid.
    fn build_mesh(&self, n: usize) -> Result<Mesh>;

    /// Points on material interfaces with the unit normal and the regions
    /// on either side, used to check the transmission conditions.
    fn interface_samples(&self) -> Vec<InterfaceSample> {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceSample {
    pub point: Vec2,
    pub normal: Vec2,
    pub regions: (usize, usize),
}

/// Names of the built-in cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseName {
    CurvedBoundary,
    CircleInclusion,
    DoubleInterface,
}

impl CaseName {
    pub const ALL: [CaseName; 3] = [Self::CurvedBoundary, Self::CircleInclusion, Self::DoubleInterface];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::CurvedBoundary => "curved-boundary",
            Self::CircleInclusion => "circle-inclusion",
            Self::DoubleInterface => "double-interface",
        }
    }

    pub fn build(self) -> Box<dyn ManufacturedCase> {
        match self {
            Self::CurvedBoundary => Box::new(CurvedBoundary::new()),
            Self::CircleInclusion => Box::new(CircleInclusion::new()),
            Self::DoubleInterface => Box::new(DoubleInterface::new()),
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown case {s:?}")))
    }
}

/// `p = sin(pi x) cos(pi y)`, `q = -grad p`, `kappa = I` on the unit square
/// with cubic top and bottom sides.
#[derive(Debug, Clone)]
pub struct CurvedBoundary {
    top: Arc<ParametricCurve>,
    bottom: Arc<ParametricCurve>,
    project_boundary: bool,
}

impl CurvedBoundary {
    pub fn new() -> Self {
        let graph = |name: &str, c0: f64| {
            let kind = CurveKind::PolynomialGraph { coeffs: vec![c0, 0.0, -0.5, 0.5] };
            Arc::new(ParametricCurve::new(name, kind, (0.0, 1.0)).expect("valid graph"))
        };
        Self {
            top: graph("top", 1.0),
            bottom: graph("bottom", 0.0),
            project_boundary: true,
        }
    }

    /// Same solution with the boundary pressure taken at the quadrature
    /// point itself, for meshes of arbitrary shape.
    pub fn unprojected() -> Self {
        Self { project_boundary: false, ..Self::new() }
    }

    pub fn top(&self) -> &Arc<ParametricCurve> {
        &self.top
    }

    pub fn bottom(&self) -> &Arc<ParametricCurve> {
        &self.bottom
    }

    fn p(x: Vec2) -> f64 {
        (PI * x.x).sin() * (PI * x.y).cos()
    }
}

impl Default for CurvedBoundary {
    fn default() -> Self {
        Self::new()
    }
}

impl DarcyProblem for CurvedBoundary {
    fn kappa(&self, _: usize, _: Vec2) -> Matrix2<f64> {
        Matrix2::identity()
    }

    fn source(&self, _: usize, x: Vec2) -> f64 {
        -2.0 * PI * PI * Self::p(x)
    }

    /// Points of a chord approximating the top or bottom side are moved
    /// vertically onto the curve before evaluating the pressure.
    fn boundary_pressure(&self, _: usize, x: Vec2) -> f64 {
        let on_side = x.x.abs() < 1e-12 || (x.x - 1.0).abs() < 1e-12;
        if !self.project_boundary || on_side {
            return Self::p(x);
        }
        let curve = if x.y < 0.5 { &self.bottom } else { &self.top };
        Self::p(curve.eval(x.x.clamp(0.0, 1.0)))
    }
}

impl ManufacturedCase for CurvedBoundary {
    fn name(&self) -> &str {
        CaseName::CurvedBoundary.as_str()
    }

    fn pressure(&self, _: usize, x: Vec2) -> f64 {
        Self::p(x)
    }

    fn velocity(&self, _: usize, x: Vec2) -> Vec2 {
        let (sx, cx) = (PI * x.x).sin_cos();
        let (sy, cy) = (PI * x.y).sin_cos();
        Vec2::new(-PI * cx * cy, PI * sx * sy)
    }

    fn build_mesh(&self, n: usize) -> Result<Mesh> {
        deformed_quad_mesh(n, self.top.clone(), self.bottom.clone())
    }
}

/// Circular inclusion of radius `R` and permeability `k2` (region 1) in the
/// square `(-1, 1)^2` of permeability `k1` (region 0).
#[derive(Debug, Clone)]
pub struct CircleInclusion {
    pub radius: f64,
    pub k1: f64,
    pub k2: f64,
}

impl CircleInclusion {
    pub fn new() -> Self {
        Self {
            radius: 0.45,
            k1: 1.0,
            k2: 0.1,
        }
    }

    pub fn interface(&self) -> Arc<ParametricCurve> {
        let kind = CurveKind::Circle {
            center: Vec2::zeros(),
            radius: self.radius,
        };
        Arc::new(ParametricCurve::new("inclusion", kind, (0.0, TAU)).expect("valid circle"))
    }

    fn k(&self, region: usize) -> f64 {
        if region == 1 {
            self.k2
        } else {
            self.k1
        }
    }
}

impl Default for CircleInclusion {
    fn default() -> Self {
        Self::new()
    }
}

/// `sin(r) / r`, accurate near zero.
fn sinc(r: f64) -> f64 {
    if r < 1e-4 {
        1.0 - r * r / 6.0
    } else {
        r.sin() / r
    }
}

impl DarcyProblem for CircleInclusion {
    fn kappa(&self, region: usize, _: Vec2) -> Matrix2<f64> {
        Matrix2::identity() * self.k(region)
    }

    fn source(&self, region: usize, x: Vec2) -> f64 {
        let r = x.norm();
        let outer = if region == 1 { 1.0 } else { self.k1 };
        -outer * self.k2 * (r.cos() + sinc(r))
    }

    fn boundary_pressure(&self, region: usize, x: Vec2) -> f64 {
        self.pressure(region, x)
    }
}

impl ManufacturedCase for CircleInclusion {
    fn name(&self) -> &str {
        CaseName::CircleInclusion.as_str()
    }

    fn pressure(&self, region: usize, x: Vec2) -> f64 {
        let r = x.norm();
        if region == 1 {
            r.cos()
        } else {
            self.k2 * r.cos() + self.radius.cos() * (1.0 - self.k2)
        }
    }

    fn velocity(&self, region: usize, x: Vec2) -> Vec2 {
        let outer = if region == 1 { 1.0 } else { self.k1 };
        x * (outer * self.k2 * sinc(x.norm()))
    }

    fn build_mesh(&self, n: usize) -> Result<Mesh> {
        let grid = square_grid(n, Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0))?;
        cut_mesh_with_curve(&grid, self.interface(), 1)
    }

    fn interface_samples(&self) -> Vec<InterfaceSample> {
        (0..32)
            .map(|i| {
                let t = TAU * (i as f64 + 0.3) / 32.0;
                let normal = Vec2::new(t.cos(), t.sin());
                InterfaceSample {
                    point: normal * self.radius,
                    normal,
                    regions: (0, 1),
                }
            })
            .collect()
    }
}

/// Three horizontal layers of `(-1, 1)^2` separated by the graphs
/// `a sin(pi x) +- b`: region 0 on top, region 1 between, region 2 below.
#[derive(Debug, Clone)]
pub struct DoubleInterface {
    pub a: f64,
    pub b: f64,
}

impl DoubleInterface {
    pub fn new() -> Self {
        Self { a: 0.2, b: 0.31 }
    }

    /// The interface at offset `sign * b`.
    pub fn interface(&self, sign: f64) -> Arc<ParametricCurve> {
        let kind = CurveKind::SineGraph {
            amplitude: self.a,
            frequency: PI,
            phase: 0.0,
            offset: sign * self.b,
        };
        let name = if sign > 0.0 { "upper" } else { "lower" };
        Arc::new(ParametricCurve::new(name, kind, (-1.25, 1.25)).expect("valid graph"))
    }

    fn c(&self) -> f64 {
        PI / (2.0 * self.b)
    }

    fn phi(&self, x: Vec2) -> f64 {
        self.c() * (x.y - self.a * (PI * x.x).sin())
    }
}

impl Default for DoubleInterface {
    fn default() -> Self {
        Self::new()
    }
}

impl DarcyProblem for DoubleInterface {
    fn kappa(&self, _: usize, _: Vec2) -> Matrix2<f64> {
        Matrix2::identity()
    }

    fn source(&self, region: usize, x: Vec2) -> f64 {
        let (s, cpx) = (PI * x.x).sin_cos();
        match region {
            0 => -self.a * PI * PI * s,
            2 => self.a * PI * PI * s,
            _ => {
                let (a, c) = (self.a, self.c());
                let (sp, cp) = self.phi(x).sin_cos();
                let phi_x = -c * a * PI * cpx;
                let phi_xx = c * a * PI * PI * s;
                a * (-sp * s * (phi_x * phi_x + c * c + PI * PI) + cp * (phi_xx * s + 2.0 * PI * cpx * phi_x))
            }
        }
    }

    fn boundary_pressure(&self, region: usize, x: Vec2) -> f64 {
        self.pressure(region, x)
    }
}

impl ManufacturedCase for DoubleInterface {
    fn name(&self) -> &str {
        CaseName::DoubleInterface.as_str()
    }

    fn pressure(&self, region: usize, x: Vec2) -> f64 {
        let s = (PI * x.x).sin();
        match region {
            0 => self.a * s,
            2 => -self.a * s,
            _ => self.a * self.phi(x).sin() * s,
        }
    }

    fn velocity(&self, region: usize, x: Vec2) -> Vec2 {
        let (s, cpx) = (PI * x.x).sin_cos();
        let a = self.a;
        match region {
            0 => Vec2::new(-a * PI * cpx, 0.0),
            2 => Vec2::new(a * PI * cpx, 0.0),
            _ => {
                let c = self.c();
                let (sp, cp) = self.phi(x).sin_cos();
                let phi_x = -c * a * PI * cpx;
                let dx = a * (cp * phi_x * s + sp * PI * cpx);
                let dy = a * cp * c * s;
                -Vec2::new(dx, dy)
            }
        }
    }

    fn build_mesh(&self, n: usize) -> Result<Mesh> {
        let mut grid = square_grid(n, Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0))?;
        grid.set_regions(|_| 2);
        let lower = cut_mesh_with_curve(&grid, self.interface(-1.0), 1)?;
        cut_mesh_with_curve(&lower, self.interface(1.0), 0)
    }

    fn interface_samples(&self) -> Vec<InterfaceSample> {
        let mut out = Vec::new();
        for (sign, regions) in [(1.0, (0, 1)), (-1.0, (1, 2))] {
            let g = self.interface(sign);
            for i in 0..32 {
                let t = -1.0 + 2.0 * (i as f64 + 0.3) / 32.0;
                let d = g.deriv(t);
                out.push(InterfaceSample {
                    point: g.eval(t),
                    normal: Vec2::new(d.y, -d.x).normalize(),
                    regions,
                });
            }
        }
        out
    }
}

/// Polynomial pressure on a square grid with `kappa = I`, for which the
/// method is exact up to the pressure projection.
#[derive(Debug, Clone)]
pub struct PolynomialCase {
    degree: usize,
    /// Coefficients of `x^a y^b` in graded lexicographic order.
    coeffs: Vec<f64>,
    lo: Vec2,
    hi: Vec2,
}

impl PolynomialCase {
    pub fn new(degree: usize, coeffs: Vec<f64>, lo: Vec2, hi: Vec2) -> Result<Self> {
        if coeffs.len() != poly_dim(degree) {
            return Err(Error::InvalidInput(format!(
                "degree {degree} needs {} coefficients, got {}",
                poly_dim(degree),
                coeffs.len()
            )));
        }
        Ok(Self { degree, coeffs, lo, hi })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn terms(&self) -> impl Iterator<Item = (f64, i32, i32)> + '_ {
        self.coeffs.iter().enumerate().map(|(i, &c)| {
            let (a, b) = monomial_exponents(i);
            (c, a as i32, b as i32)
        })
    }
}

fn pw(x: f64, e: i32) -> f64 {
    if e < 0 {
        0.0
    } else {
        x.powi(e)
    }
}

impl DarcyProblem for PolynomialCase {
    fn kappa(&self, _: usize, _: Vec2) -> Matrix2<f64> {
        Matrix2::identity()
    }

    fn source(&self, _: usize, x: Vec2) -> f64 {
        self.terms()
            .map(|(c, a, b)| {
                let xx = f64::from(a * (a - 1)) * pw(x.x, a - 2) * pw(x.y, b);
                let yy = f64::from(b * (b - 1)) * pw(x.x, a) * pw(x.y, b - 2);
                c * (xx + yy)
            })
            .sum()
    }

    fn boundary_pressure(&self, region: usize, x: Vec2) -> f64 {
        self.pressure(region, x)
    }
}

impl ManufacturedCase for PolynomialCase {
    fn name(&self) -> &str {
        "polynomial"
    }

    fn pressure(&self, _: usize, x: Vec2) -> f64 {
        self.terms().map(|(c, a, b)| c * pw(x.x, a) * pw(x.y, b)).sum()
    }

    fn velocity(&self, _: usize, x: Vec2) -> Vec2 {
        -self
            .terms()
            .map(|(c, a, b)| {
                Vec2::new(
                    f64::from(a) * pw(x.x, a - 1) * pw(x.y, b),
                    f64::from(b) * pw(x.x, a) * pw(x.y, b - 1),
                ) * c
            })
            .sum::<Vec2>()
    }

    fn build_mesh(&self, n: usize) -> Result<Mesh> {
        square_grid(n, self.lo, self.hi)
    }
}

/// Largest defect of `mu q + kappa grad p = 0`, `div q + f = 0` and of the
/// interface conditions, with derivatives by central differences at the
/// given points.
pub fn consistency_defect(case: &dyn ManufacturedCase, points: &[(usize, Vec2)]) -> f64 {
    let d = 1e-5;
    let ex = Vec2::new(d, 0.0);
    let ey = Vec2::new(0.0, d);
    let mut worst: f64 = 0.0;
    for &(region, x) in points {
        let grad = Vec2::new(
            case.pressure(region, x + ex) - case.pressure(region, x - ex),
            case.pressure(region, x + ey) - case.pressure(region, x - ey),
        ) / (2.0 * d);
        let q = case.velocity(region, x);
        let darcy = q * case.mu(region, x) + case.kappa(region, x) * grad;
        let div = (case.velocity(region, x + ex).x - case.velocity(region, x - ex).x
            + case.velocity(region, x + ey).y
            - case.velocity(region, x - ey).y)
            / (2.0 * d);
        worst = worst.max(darcy.amax()).max((div + case.source(region, x)).abs());
    }
    for s in case.interface_samples() {
        let (r0, r1) = s.regions;
        let jump_p = case.pressure(r0, s.point) - case.pressure(r1, s.point);
        let jump_q = (case.velocity(r0, s.point) - case.velocity(r1, s.point)).dot(&s.normal);
        worst = worst.max(jump_p.abs()).max(jump_q.abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_points(regions: &[usize]) -> Vec<(usize, Vec2)> {
        let mut out = Vec::new();
        for &r in regions {
            for i in 0..9 {
                for j in 0..9 {
                    let x = Vec2::new(-0.93 + 0.23 * i as f64, -0.91 + 0.227 * j as f64);
                    out.push((r, x));
                }
            }
        }
        out
    }

    #[test]
    fn built_in_cases_are_consistent() {
        for name in CaseName::ALL {
            let case = name.build();
            let defect = consistency_defect(case.as_ref(), &grid_points(&[0, 1, 2]));
            assert!(defect < 1e-8, "{name}: {defect}");
        }
    }

    #[test]
    fn inclusion_velocity_is_continuous_and_matches_regions() {
        let case = CircleInclusion::new();
        let x = Vec2::new(0.1, 0.2);
        let y = Vec2::new(0.6, -0.3);
        let k = |r| case.k(r);
        let fd = |r: usize, p: Vec2| {
            let d = 1e-6;
            let g = Vec2::new(
                case.pressure(r, p + Vec2::new(d, 0.0)) - case.pressure(r, p - Vec2::new(d, 0.0)),
                case.pressure(r, p + Vec2::new(0.0, d)) - case.pressure(r, p - Vec2::new(0.0, d)),
            ) / (2.0 * d);
            -g * k(r)
        };
        assert!((case.velocity(1, x) - fd(1, x)).amax() < 1e-8);
        assert!((case.velocity(0, y) - fd(0, y)).amax() < 1e-8);
    }

    #[test]
    fn polynomial_case_is_consistent() {
        let case = PolynomialCase::new(3, (0..10).map(|i| 0.3 * i as f64 - 1.0).collect(), Vec2::zeros(), Vec2::new(1.0, 1.0)).unwrap();
        assert!(consistency_defect(&case, &grid_points(&[0])) < 1e-7);
    }

    #[test]
    fn case_names_round_trip() {
        for name in CaseName::ALL {
            assert_eq!(name.as_str().parse::<CaseName>().unwrap(), name);
        }
        assert!("square".parse::<CaseName>().is_err());
    }
}
