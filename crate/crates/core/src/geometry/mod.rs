//! Parametric curves, edge quadrature and integration over curved polygons.

pub mod cell;
pub mod curve;
pub mod edge;
pub mod quadrature;

pub use cell::{
    element_bulk_integral, element_measures, element_monomial_integral, fan_quadrature, is_star_point,
    monomial_integrals, CellMeasures, MonomialTable, OrientedEdge, Primitive,
};
pub use curve::{CurveKind, ParametricCurve};
pub use edge::{EdgeFrame, EdgeGeom, EdgeSample};
pub use quadrature::GaussLegendre;

/// Points and vectors in the plane.
pub type Vec2 = nalgebra::Vector2<f64>;

/// z-component of the cross product.
#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}
