//! Element-level computations for one cell.

use nalgebra::{DMatrix, DVector, Matrix2};

use super::{Discretization, DofLayout};
use crate::error::{Error, Result};
use crate::geometry::{
    element_measures, fan_quadrature, is_star_point, monomial_integrals, EdgeGeom, EdgeSample, MonomialTable,
    OrientedEdge, Primitive, Vec2,
};
use crate::poly::{eval_monomials, mass_matrix_element, monomial_exponents, poly_dim, poly_dim_below, EdgeBasis, ScaledBasis};

/// Per-edge data of an element.
#[derive(Debug, Clone)]
struct LocalEdge {
    geom: EdgeGeom,
    sigma: f64,
    length: f64,
    basis: EdgeBasis,
    mass_inv: DMatrix<f64>,
    samples: Vec<EdgeSample>,
}

/// Matrices of one element, with rows and columns in [`DofLayout`] order.
#[derive(Debug, Clone)]
pub struct LocalMatrices {
    /// DoF values to coefficients of the L2 projection onto vector polynomials.
    pub projector: DMatrix<f64>,
    /// Vector polynomial coefficients to their DoF values.
    pub dofs_of_polys: DMatrix<f64>,
    pub stabilization: DMatrix<f64>,
    pub a: DMatrix<f64>,
    /// `B[j, s] = -int_E div(phi_s) m_j`.
    pub b: DMatrix<f64>,
    /// Scaling of the stabilization term.
    pub nu: f64,
}

/// Geometry, bases and quadrature of one cell, from which all local
/// operators are built.
#[derive(Debug, Clone)]
pub struct LocalElement<'d> {
    disc: &'d Discretization,
    cell: usize,
    layout: DofLayout,
    area: f64,
    basis: ScaledBasis,
    table: MonomialTable,
    mass: DMatrix<f64>,
    mass_inv: DMatrix<f64>,
    edges: Vec<LocalEdge>,
    bulk: Vec<(Vec2, f64)>,
}

impl<'d> LocalElement<'d> {
    /// `cell` is only used to label errors.
    pub fn new(disc: &'d Discretization, cell: usize, boundary: &[OrientedEdge]) -> Result<Self> {
        let k = disc.degree();
        let rule = disc.edge_rule();
        let measures = element_measures(boundary, rule)?;
        let h = measures.diameter;
        let basis = ScaledBasis::new(measures.centroid, h, k);
        let table = monomial_integrals(boundary, measures.centroid, h, 2 * k + 1, rule, Primitive::X)?;
        let mass = mass_matrix_element(&table, k).map_err(|_| Error::SingularGram { cell })?;
        let mass_inv = mass
            .clone()
            .cholesky()
            .ok_or(Error::SingularGram { cell })?
            .inverse();
        let edges = boundary
            .iter()
            .map(|e| -> Result<LocalEdge> {
                let samples = e.geom.samples(rule)?;
                let length = samples.iter().map(|s| s.weight * s.speed).sum();
                let m = crate::poly::mass_matrix_edge(e.geom, k, rule)?;
                let mass_inv = m.cholesky().ok_or(Error::NotSpd { what: "edge mass matrix" })?.inverse();
                Ok(LocalEdge {
                    geom: e.geom.clone(),
                    sigma: f64::from(e.sigma),
                    length,
                    basis: EdgeBasis::for_edge(e.geom, k),
                    mass_inv,
                    samples,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let star = star_point(boundary, measures.centroid, rule)?;
        if star.is_none() {
            log::warn!("cell {cell} has no star point among the candidates; using the signed fan");
        }
        let bulk = fan_quadrature(boundary, star.unwrap_or(measures.centroid), disc.bulk_rule(), false)?;
        Ok(Self {
            disc,
            cell,
            layout: DofLayout::new(k, boundary.len()),
            area: measures.area,
            basis,
            table,
            mass,
            mass_inv,
            edges,
            bulk,
        })
    }

    pub fn layout(&self) -> DofLayout {
        self.layout
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn diameter(&self) -> f64 {
        self.basis.scale
    }

    pub fn centroid(&self) -> Vec2 {
        self.basis.center
    }

    pub fn basis(&self) -> &ScaledBasis {
        &self.basis
    }

    /// `H_ij = int_E m_i m_j`.
    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }

    /// Quadrature points and weights covering the cell.
    pub fn bulk_quadrature(&self) -> &[(Vec2, f64)] {
        &self.bulk
    }

    /// Arc length of local edge `e`.
    pub fn edge_length(&self, e: usize) -> f64 {
        self.edges[e].length
    }

    fn k(&self) -> usize {
        self.layout.k
    }

    /// Coefficients `c` of `w . n^e = sum c_i m_i` on edge `e` from its moments.
    pub fn edge_normal_poly(&self, e: usize, d1: &[f64]) -> Vec<f64> {
        let edge = &self.edges[e];
        let c = &edge.mass_inv * DVector::from_column_slice(d1) * edge.length;
        c.iter().copied().collect()
    }

    /// Matrix mapping DoFs to `int_E div(w) m_j`: row 0 is the boundary flux,
    /// the other rows the scaled divergence moments.
    fn divergence_moments(&self) -> DMatrix<f64> {
        let n = self.layout.len();
        let pk = poly_dim(self.k());
        let mut r = DMatrix::zeros(pk, n);
        for (e, edge) in self.edges.iter().enumerate() {
            r[(0, self.layout.edge(e).start)] += edge.sigma * edge.length;
        }
        let scale = self.area / self.diameter();
        for (j, col) in self.layout.divergence().enumerate() {
            r[(j + 1, col)] = scale;
        }
        r
    }

    /// Coefficients of `div w` in the scaled basis.
    pub fn divergence_poly(&self, dofs: &[f64]) -> Vec<f64> {
        let d = &self.mass_inv * (self.divergence_moments() * DVector::from_column_slice(dofs));
        d.iter().copied().collect()
    }

    /// `B[j, s] = -int_E div(phi_s) m_j`.
    pub fn b_matrix(&self) -> Result<DMatrix<f64>> {
        let b = -self.divergence_moments();
        if b.row_iter().any(|r| r.norm() == 0.0) {
            return Err(Error::RankDeficientB { cell: self.cell });
        }
        Ok(b)
    }

    /// Matrix of the L2 projection onto `[P_k]^2` (rows: `x` block then `y` block).
    pub fn projector(&self) -> DMatrix<f64> {
        let k = self.k();
        let pk = poly_dim(k);
        let pk1 = poly_dim(k + 1);
        let n = self.layout.len();
        let h = self.diameter();
        let mut rhs = DMatrix::zeros(2 * pk, n);

        // div w in terms of the DoFs.
        let div = &self.mass_inv * self.divergence_moments();

        // Edge values of the degree k+1 monomials and the edge basis.
        let mut mono = vec![0.0; pk1];
        let mut em = vec![0.0; k + 1];
        let edge_moments: Vec<DMatrix<f64>> = self
            .edges
            .iter()
            .map(|edge| {
                // q[rho, alpha] = int_e m~_rho m_alpha de
                let mut q = DMatrix::zeros(k + 1, pk1);
                for s in &edge.samples {
                    eval_monomials(self.basis.local(s.point), k + 1, &mut mono);
                    edge.basis.eval_all(s.t, &mut em);
                    let w = s.weight * s.speed;
                    for r in 0..=k {
                        for (a, m) in mono.iter().enumerate() {
                            q[(r, a)] += w * em[r] * m;
                        }
                    }
                }
                // Map to DoF coefficients: sigma h_e M~^{-1} q.
                &edge.mass_inv * q * (edge.sigma * edge.length)
            })
            .collect();

        for s in 0..2 * pk {
            let dec = self.disc.unit_decomposition(s);
            let potential: Vec<f64> = dec.potential().iter().map(|c| c * h).collect();
            for (e, q) in edge_moments.iter().enumerate() {
                let cols = self.layout.edge(e);
                for r in 0..=k {
                    let v: f64 = (0..pk1).map(|a| q[(r, a)] * potential[a]).sum();
                    rhs[(s, cols.start + r)] += v;
                }
            }
            // - int div(w) p_s
            for th in 0..pk {
                let (ta, tb) = monomial_exponents(th);
                let mut moment = 0.0;
                for (a, &c) in potential.iter().enumerate().skip(1) {
                    let (aa, ab) = monomial_exponents(a);
                    moment += c * self.table.get(ta + aa, tb + ab);
                }
                if moment != 0.0 {
                    for col in 0..n {
                        rhs[(s, col)] -= moment * div[(th, col)];
                    }
                }
            }
            for (l, col) in self.layout.interior().enumerate() {
                rhs[(s, col)] += dec.perp_part[l] * self.area;
            }
        }
        let mut p = DMatrix::zeros(2 * pk, n);
        p.rows_mut(0, pk).copy_from(&(&self.mass_inv * rhs.rows(0, pk)));
        p.rows_mut(pk, pk).copy_from(&(&self.mass_inv * rhs.rows(pk, pk)));
        p
    }

    /// DoF values of the vector monomials (one column per monomial).
    pub fn dofs_of_polys(&self) -> DMatrix<f64> {
        let k = self.k();
        let pk = poly_dim(k);
        let n = self.layout.len();
        let mut d = DMatrix::zeros(n, 2 * pk);
        let mut mono = vec![0.0; pk];
        let mut em = vec![0.0; k + 1];
        for (e, edge) in self.edges.iter().enumerate() {
            let orient = edge.geom.orientation();
            let rows = self.layout.edge(e);
            for s in &edge.samples {
                eval_monomials(self.basis.local(s.point), k, &mut mono);
                edge.basis.eval_all(s.t, &mut em);
                let nm = s.normal_measure(orient) * (s.weight / edge.length);
                for i in 0..=k {
                    for (r, m) in mono.iter().enumerate() {
                        d[(rows.start + i, r)] += em[i] * m * nm.x;
                        d[(rows.start + i, pk + r)] += em[i] * m * nm.y;
                    }
                }
            }
        }
        let t = |a: usize, b: usize| self.table.get(a, b);
        for (j, row) in self.layout.divergence().enumerate() {
            let (ja, jb) = monomial_exponents(j + 1);
            for r in 0..pk {
                let (a, b) = monomial_exponents(r);
                if a > 0 {
                    d[(row, r)] = a as f64 * t(a - 1 + ja, b + jb) / self.area;
                }
                if b > 0 {
                    d[(row, pk + r)] = b as f64 * t(a + ja, b - 1 + jb) / self.area;
                }
            }
        }
        for (l, row) in self.layout.interior().enumerate() {
            let (la, lb) = monomial_exponents(l);
            for r in 0..pk {
                let (a, b) = monomial_exponents(r);
                d[(row, r)] = t(a + la, b + lb + 1) / self.area;
                d[(row, pk + r)] = -t(a + la + 1, b + lb) / self.area;
            }
        }
        d
    }

    /// `int_E W M_s . M_t` for the vector monomials, where `W(x)` is the
    /// symmetric tensor `mu kappa^{-1}`. A constant tensor is integrated
    /// exactly, a variable one with the bulk quadrature.
    pub fn weighted_mass(&self, weight: &dyn Fn(Vec2) -> Matrix2<f64>, constant: bool) -> DMatrix<f64> {
        let pk = poly_dim(self.k());
        let mut c = DMatrix::zeros(2 * pk, 2 * pk);
        if constant {
            let w = weight(self.centroid());
            for (bi, bj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let block = &self.mass * w[(bi, bj)];
                c.view_mut((bi * pk, bj * pk), (pk, pk)).copy_from(&block);
            }
        } else {
            let mut mono = vec![0.0; pk];
            for &(x, wq) in &self.bulk {
                eval_monomials(self.basis.local(x), self.k(), &mut mono);
                let w = weight(x) * wq;
                for i in 0..pk {
                    for j in 0..pk {
                        let m = mono[i] * mono[j];
                        c[(i, j)] += w[(0, 0)] * m;
                        c[(i, pk + j)] += w[(0, 1)] * m;
                        c[(pk + i, j)] += w[(1, 0)] * m;
                        c[(pk + i, pk + j)] += w[(1, 1)] * m;
                    }
                }
            }
        }
        c
    }

    /// `|E|` times the identity in DoF coordinates.
    pub fn stabilization(&self) -> DMatrix<f64> {
        DMatrix::identity(self.layout.len(), self.layout.len()) * self.area
    }

    /// All element matrices for the tensor `W = mu kappa^{-1}`. The
    /// stabilization is scaled by half the trace of `W` at the centroid.
    pub fn matrices(&self, weight: &dyn Fn(Vec2) -> Matrix2<f64>, constant: bool) -> Result<LocalMatrices> {
        let projector = self.projector();
        let dofs_of_polys = self.dofs_of_polys();
        let stabilization = self.stabilization();
        let c = self.weighted_mass(weight, constant);
        let nu = 0.5 * weight(self.centroid()).trace();
        let n = self.layout.len();
        let defect = DMatrix::identity(n, n) - &dofs_of_polys * &projector;
        let mut a = projector.transpose() * &c * &projector + defect.transpose() * &stabilization * &defect * nu;
        a = (&a + a.transpose()) * 0.5;
        Ok(LocalMatrices {
            b: self.b_matrix()?,
            projector,
            dofs_of_polys,
            stabilization,
            a,
            nu,
        })
    }

    /// `int_E f m_j` by bulk quadrature.
    pub fn load_vector(&self, f: &dyn Fn(Vec2) -> f64) -> Vec<f64> {
        let pk = poly_dim(self.k());
        let mut out = vec![0.0; pk];
        let mut mono = vec![0.0; pk];
        for &(x, w) in &self.bulk {
            eval_monomials(self.basis.local(x), self.k(), &mut mono);
            let fw = f(x) * w;
            for (o, m) in out.iter_mut().zip(&mono) {
                *o += fw * m;
            }
        }
        out
    }

    /// Moments `int_e g m~_i de` on local edge `e`.
    fn edge_moments(&self, e: usize, g: &dyn Fn(Vec2) -> f64) -> DVector<f64> {
        let edge = &self.edges[e];
        let k = self.k();
        let mut out = DVector::zeros(k + 1);
        let mut em = vec![0.0; k + 1];
        for s in &edge.samples {
            edge.basis.eval_all(s.t, &mut em);
            let gw = g(s.point) * s.weight * s.speed;
            for i in 0..=k {
                out[i] += gw * em[i];
            }
        }
        out
    }

    /// `-int_e pbar phi_s . n_E` for the edge DoFs of local edge `e`.
    pub fn boundary_load(&self, e: usize, pbar: &dyn Fn(Vec2) -> f64) -> Vec<f64> {
        let edge = &self.edges[e];
        let v = &edge.mass_inv * self.edge_moments(e, pbar) * (-edge.sigma * edge.length);
        v.iter().copied().collect()
    }

    /// Coefficients of the L2 projection of `g` onto the mapped polynomials of edge `e`.
    pub fn edge_l2_project(&self, e: usize, g: &dyn Fn(Vec2) -> f64) -> Vec<f64> {
        let c = &self.edges[e].mass_inv * self.edge_moments(e, g);
        c.iter().copied().collect()
    }

    /// Evaluates the mapped edge polynomial with coefficients `c` at parameter `t`.
    pub fn edge_poly_at(&self, e: usize, c: &[f64], t: f64) -> f64 {
        self.edges[e].basis.eval_poly(c, t)
    }

    /// Interpolant matching all DoFs of the field `w` with divergence `div_w`.
    pub fn fortin(&self, w: &dyn Fn(Vec2) -> Vec2, div_w: &dyn Fn(Vec2) -> f64) -> Vec<f64> {
        let k = self.k();
        let pk = poly_dim(k);
        let mut out = vec![0.0; self.layout.len()];
        let mut em = vec![0.0; k + 1];
        for (e, edge) in self.edges.iter().enumerate() {
            let orient = edge.geom.orientation();
            let rows = self.layout.edge(e);
            for s in &edge.samples {
                edge.basis.eval_all(s.t, &mut em);
                let flux = w(s.point).dot(&s.normal_measure(orient)) * s.weight / edge.length;
                for i in 0..=k {
                    out[rows.start + i] += flux * em[i];
                }
            }
        }
        let mut mono = vec![0.0; pk];
        let d2 = self.layout.divergence();
        let d3 = self.layout.interior();
        let n_perp = poly_dim_below(k);
        for &(x, wq) in &self.bulk {
            eval_monomials(self.basis.local(x), k, &mut mono);
            let dv = div_w(x) * wq * self.diameter() / self.area;
            for j in 1..pk {
                out[d2.start + j - 1] += dv * mono[j];
            }
            if n_perp > 0 {
                let (xi, eta) = self.basis.local(x);
                let wx = w(x);
                let perp = (wx.x * eta - wx.y * xi) * wq / self.area;
                for l in 0..n_perp {
                    out[d3.start + l] += perp * mono[l];
                }
            }
        }
        out
    }

    /// Value of the vector polynomial with coefficients `c` (x block, y block).
    pub fn eval_vector(&self, c: &[f64], x: Vec2) -> Vec2 {
        let pk = poly_dim(self.k());
        let mut mono = vec![0.0; pk];
        eval_monomials(self.basis.local(x), self.k(), &mut mono);
        let vx = c[..pk].iter().zip(&mono).map(|(a, b)| a * b).sum();
        let vy = c[pk..].iter().zip(&mono).map(|(a, b)| a * b).sum();
        Vec2::new(vx, vy)
    }

    /// Value of the scalar polynomial with coefficients `c`.
    pub fn eval_scalar(&self, c: &[f64], x: Vec2) -> f64 {
        self.basis.eval_poly(c, x)
    }

    /// `int_E p m_j` coefficients of the L2 projection of `f` onto `P_k`.
    pub fn l2_project(&self, f: &dyn Fn(Vec2) -> f64) -> Vec<f64> {
        let c = &self.mass_inv * DVector::from_vec(self.load_vector(f));
        c.iter().copied().collect()
    }
}

/// Fan quadrature over a cell from a star point, with `rule` in both fan
/// directions. Falls back to the signed fan from the centroid.
pub fn cell_quadrature(
    boundary: &[OrientedEdge],
    rule: &crate::geometry::GaussLegendre,
) -> Result<Vec<(Vec2, f64)>> {
    let centroid = element_measures(boundary, rule)?.centroid;
    let star = star_point(boundary, centroid, rule)?;
    fan_quadrature(boundary, star.unwrap_or(centroid), rule, false)
}

/// A point from which the whole cell boundary is visible: the centroid if
/// possible, otherwise the vertex average or points between the centroid
/// and the vertices.
fn star_point(
    boundary: &[OrientedEdge],
    centroid: Vec2,
    rule: &crate::geometry::GaussLegendre,
) -> Result<Option<Vec2>> {
    if is_star_point(boundary, centroid, rule)? {
        return Ok(Some(centroid));
    }
    let verts: Vec<Vec2> = boundary.iter().map(|e| e.from_point()).collect();
    let mean = verts.iter().sum::<Vec2>() / verts.len() as f64;
    let mut candidates = vec![mean];
    for v in &verts {
        for tau in [0.25, 0.5, 0.75] {
            candidates.push(centroid + (v - centroid) * tau);
        }
    }
    for c in candidates {
        if is_star_point(boundary, c, rule)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CurveKind, ParametricCurve};
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

    fn half_disk() -> Vec<EdgeGeom> {
        let c = Arc::new(
            ParametricCurve::new("c", CurveKind::Circle { center: Vec2::new(0.2, 0.1), radius: 0.5 }, (0.0, TAU)).unwrap(),
        );
        vec![
            EdgeGeom::straight(Vec2::new(-0.3, 0.1), Vec2::new(0.7, 0.1)),
            EdgeGeom::Curved { curve: c, t0: 0.0, t1: PI, orient: 1 },
        ]
    }

    #[test]
    fn edge_normal_reconstruction() {
        let disc = Discretization::new(1).unwrap();
        let sq = polygon(&[(0.0, 0.0), (0.5, 0.0), (0.5, 0.5), (0.0, 0.5)]);
        let el = LocalElement::new(&disc, 0, &oriented(&sq)).unwrap();
        let c = el.edge_normal_poly(0, &[1.0, 0.0]);
        assert!((c[0] - 1.0).abs() < 1e-14 && c[1].abs() < 1e-14);
        assert!(el.edge_normal_poly(1, &[0.0, 0.0]).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn k0_unit_square_b_row() {
        let disc = Discretization::new(0).unwrap();
        let sq = polygon(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let el = LocalElement::new(&disc, 0, &oriented(&sq)).unwrap();
        let b = el.b_matrix().unwrap();
        for e in 0..4 {
            assert!((b[(0, e)] + 1.0).abs() < 1e-15);
        }
        // f = 1 gives the area; the stabilization is |E| I.
        assert!((el.load_vector(&|_| 1.0)[0] - 1.0).abs() < 1e-14);
        assert!((el.stabilization() - DMatrix::identity(4, 4)).amax() < 1e-15);
    }

    #[test]
    fn polynomial_consistency_on_straight_cells() {
        for k in 0..=3 {
            let disc = Discretization::new(k).unwrap();
            let tri = polygon(&[(0.1, 0.0), (0.9, 0.2), (0.3, 0.7)]);
            let el = LocalElement::new(&disc, 0, &oriented(&tri)).unwrap();
            let p = el.projector();
            let d = el.dofs_of_polys();
            let pd = &p * &d;
            let id = DMatrix::<f64>::identity(pd.nrows(), pd.ncols());
            assert!((pd - id).amax() < 1e-11, "k = {k}");
        }
    }

    #[test]
    fn fortin_matches_dof_matrix_on_polynomials() {
        let k = 2;
        let disc = Discretization::with_quadrature(k, 16, 16).unwrap();
        let hd = half_disk();
        let el = LocalElement::new(&disc, 0, &oriented(&hd)).unwrap();
        let d = el.dofs_of_polys();
        // w = (m_x m_y, m_x^2 + 1)
        let pk = poly_dim(k);
        let mut coeffs = vec![0.0; 2 * pk];
        coeffs[4] = 1.0;
        coeffs[pk + 3] = 1.0;
        coeffs[pk] = 1.0;
        let expect = &d * DVector::from_column_slice(&coeffs);
        let h = el.diameter();
        let c = el.centroid();
        let w = |x: Vec2| {
            let (xi, eta) = ((x.x - c.x) / h, (x.y - c.y) / h);
            Vec2::new(xi * eta, xi * xi + 1.0)
        };
        let div = |x: Vec2| ((x.y - c.y) / h) / h;
        let got = el.fortin(&w, &div);
        for (a, b) in got.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        // div of the interpolant is the projection of div w
        let dv = el.divergence_poly(&got);
        let proj = el.l2_project(&div);
        for (a, b) in dv.iter().zip(&proj) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn radial_field_divergence() {
        let disc = Discretization::with_quadrature(1, 16, 16).unwrap();
        let hd = half_disk();
        let el = LocalElement::new(&disc, 0, &oriented(&hd)).unwrap();
        let (c, h) = (el.centroid(), el.diameter());
        let dofs = el.fortin(&|x| (x - c) / h, &|_| 2.0 / h);
        let d = el.divergence_poly(&dofs);
        assert!((d[0] - 2.0 / h).abs() < 1e-11 * (2.0 / h));
        assert!(d[1].abs() < 1e-11 && d[2].abs() < 1e-11);
    }

    #[test]
    fn constant_field_energy() {
        let disc = Discretization::new(1).unwrap();
        let sq = polygon(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let el = LocalElement::new(&disc, 0, &oriented(&sq)).unwrap();
        let m = el.matrices(&|_| Matrix2::identity(), true).unwrap();
        let dofs = DVector::from_vec(el.fortin(&|_| Vec2::new(0.6, -0.8), &|_| 0.0));
        let energy = (dofs.transpose() * &m.a * &dofs)[(0, 0)];
        assert!((energy - 1.0).abs() < 1e-13);
        assert!((&m.a - m.a.transpose()).amax() < 1e-13);
    }

    #[test]
    fn boundary_load_of_unit_pressure() {
        for k in 0..=3 {
            let disc = Discretization::new(k).unwrap();
            let sq = polygon(&[(0.0, 0.0), (0.3, 0.0), (0.3, 0.3), (0.0, 0.3)]);
            let el = LocalElement::new(&disc, 0, &oriented(&sq)).unwrap();
            let g = el.boundary_load(0, &|_| 1.0);
            assert!((g[0] + 0.3).abs() < 1e-14);
            assert!(g[1..].iter().all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn edge_projection_orthogonality() {
        let disc = Discretization::with_quadrature(1, 12, 6).unwrap();
        let hd = half_disk();
        let el = LocalElement::new(&disc, 0, &oriented(&hd)).unwrap();
        let g = |x: Vec2| (3.0 * x.x).sin() + x.y;
        let c = el.edge_l2_project(1, &g);
        let edge = &el.edges[1];
        let mut em = vec![0.0; 2];
        let mut resid = [0.0; 2];
        for s in &edge.samples {
            edge.basis.eval_all(s.t, &mut em);
            let r = g(s.point) - el.edge_poly_at(1, &c, s.t);
            for i in 0..2 {
                resid[i] += r * em[i] * s.weight * s.speed;
            }
        }
        assert!(resid.iter().all(|r| r.abs() < 1e-12));
    }
}
