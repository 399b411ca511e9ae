//! Scaled monomial bases, the gradient / `x-perp` decomposition of vector
//! polynomials, and polynomial mass matrices.
//!
//! Monomials are ordered graded-lexicographically with `x` before `y`:
//! `1, x, y, x^2, xy, y^2, ...`. Vector polynomials of degree `n` stack the
//! `x` component block (`pi_n` coefficients) before the `y` component block.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{EdgeGeom, GaussLegendre, MonomialTable, Vec2};

/// `pi_n = (n + 1)(n + 2) / 2`, the dimension of `P_n` in two variables.
pub const fn poly_dim(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// `pi_{k-1}`, which is zero for `k = 0`.
pub const fn poly_dim_below(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Graded-lex index of the monomial `x^a y^b`.
pub const fn monomial_index(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

/// Exponents `(a, b)` of the monomial with graded-lex index `i`.
pub fn monomial_exponents(i: usize) -> (usize, usize) {
    let mut d = 0;
    while poly_dim(d) <= i {
        d += 1;
    }
    let b = i - d * (d + 1) / 2;
    (d - b, b)
}

/// The scaled monomials `((x - x_E)/h_E)^a ((y - y_E)/h_E)^b`, `a + b <= degree`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBasis {
    pub center: Vec2,
    pub scale: f64,
    pub degree: usize,
}

impl ScaledBasis {
    pub fn new(center: Vec2, scale: f64, degree: usize) -> Self {
        Self { center, scale, degree }
    }

    pub fn len(&self) -> usize {
        poly_dim(self.degree)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn local(&self, x: Vec2) -> (f64, f64) {
        ((x.x - self.center.x) / self.scale, (x.y - self.center.y) / self.scale)
    }

    fn check(&self, index: usize) -> Result<(usize, usize)> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange { index, len: self.len() });
        }
        Ok(monomial_exponents(index))
    }

    pub fn eval(&self, index: usize, x: Vec2) -> Result<f64> {
        let (a, b) = self.check(index)?;
        let (xi, eta) = self.local(x);
        Ok(xi.powi(a as i32) * eta.powi(b as i32))
    }

    /// All basis functions at `x`.
    pub fn eval_all(&self, x: Vec2) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        eval_monomials(self.local(x), self.degree, &mut out);
        out
    }

    /// Exact gradient as a vector polynomial of degree `degree - 1` in the same
    /// center and scale (degree 0 for the constant).
    pub fn grad(&self, index: usize) -> Result<VectorPoly> {
        let (a, b) = self.check(index)?;
        let n = self.degree.saturating_sub(1);
        let mut out = VectorPoly::zero(n);
        let m = poly_dim(n);
        if a > 0 {
            out.coeffs[monomial_index(a - 1, b)] = a as f64 / self.scale;
        }
        if b > 0 {
            out.coeffs[m + monomial_index(a, b - 1)] = b as f64 / self.scale;
        }
        Ok(out)
    }

    pub fn grad_at(&self, index: usize, x: Vec2) -> Result<Vec2> {
        let (a, b) = self.check(index)?;
        let (xi, eta) = self.local(x);
        let dx = if a > 0 { a as f64 * xi.powi(a as i32 - 1) * eta.powi(b as i32) } else { 0.0 };
        let dy = if b > 0 { b as f64 * xi.powi(a as i32) * eta.powi(b as i32 - 1) } else { 0.0 };
        Ok(Vec2::new(dx, dy) / self.scale)
    }

    /// Evaluates `sum_i c_i m_i(x)`.
    pub fn eval_poly(&self, coeffs: &[f64], x: Vec2) -> f64 {
        let vals = self.eval_all(x);
        coeffs.iter().zip(&vals).map(|(c, v)| c * v).sum()
    }
}

/// Writes `xi^a eta^b` for all `a + b <= degree` into `out` (graded-lex).
pub fn eval_monomials((xi, eta): (f64, f64), degree: usize, out: &mut [f64]) {
    out[0] = 1.0;
    for d in 1..=degree {
        let base = d * (d + 1) / 2;
        let prev = (d - 1) * d / 2;
        for b in 0..d {
            out[base + b] = out[prev + b] * xi;
        }
        out[base + d] = out[prev + d - 1] * eta;
    }
}

/// Vector polynomial coefficients in the stacked basis `(m_r, 0), (0, m_s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorPoly {
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl VectorPoly {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![0.0; 2 * poly_dim(degree)],
        }
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != 2 * poly_dim(degree) {
            return Err(Error::InvalidInput(format!(
                "vector polynomial of degree {degree} needs {} coefficients, got {}",
                2 * poly_dim(degree),
                coeffs.len()
            )));
        }
        Ok(Self { degree, coeffs })
    }

    pub fn x_part(&self) -> &[f64] {
        &self.coeffs[..poly_dim(self.degree)]
    }

    pub fn y_part(&self) -> &[f64] {
        &self.coeffs[poly_dim(self.degree)..]
    }

    pub fn eval(&self, basis: &ScaledBasis, x: Vec2) -> Vec2 {
        let m = poly_dim(self.degree);
        let mut vals = vec![0.0; m];
        eval_monomials(basis.local(x), self.degree, &mut vals);
        let vx = self.x_part().iter().zip(&vals).map(|(c, v)| c * v).sum();
        let vy = self.y_part().iter().zip(&vals).map(|(c, v)| c * v).sum();
        Vec2::new(vx, vy)
    }
}

/// `v = grad p + sum_l g_l m_perp m_l` with `m_perp = ((y - y_E)/h, -(x - x_E)/h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Coefficients of `p` on `m_1, ..., m_{pi_{n+1} - 1}`; the constant is omitted.
    pub grad_part: Vec<f64>,
    /// Coefficients `g_l` against `m_perp m_l`, `l < pi_{n-1}`.
    pub perp_part: Vec<f64>,
}

impl Decomposition {
    /// Coefficients of `p` on the full degree `n + 1` basis (zero constant).
    pub fn potential(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.grad_part.len() + 1);
        p.push(0.0);
        p.extend_from_slice(&self.grad_part);
        p
    }
}

/// Change of basis from `M_n(E)^2` to `grad M_{n+1} \ 1` plus `m_perp M_{n-1}`.
///
/// The matrix is built in the unit-scaled variables; the dependence on `h_E`
/// is a single factor on the gradient part.
#[derive(Debug, Clone)]
pub struct PolyDecomposer {
    degree: usize,
    basis_matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl PolyDecomposer {
    pub fn new(degree: usize) -> Result<Self> {
        let m = poly_dim(degree);
        let n_grad = poly_dim(degree + 1) - 1;
        let n_perp = poly_dim_below(degree);
        debug_assert_eq!(n_grad + n_perp, 2 * m);
        let mut t = DMatrix::zeros(2 * m, 2 * m);
        for col in 0..n_grad {
            let (a, b) = monomial_exponents(col + 1);
            if a > 0 {
                t[(monomial_index(a - 1, b), col)] = a as f64;
            }
            if b > 0 {
                t[(m + monomial_index(a, b - 1), col)] = b as f64;
            }
        }
        for l in 0..n_perp {
            let (a, b) = monomial_exponents(l);
            let col = n_grad + l;
            // m_perp m_l = (eta m_l, -xi m_l)
            t[(monomial_index(a, b + 1), col)] = 1.0;
            t[(m + monomial_index(a + 1, b), col)] = -1.0;
        }
        let inverse = t.clone().lu().try_inverse().ok_or(Error::SingularBasis)?;
        Ok(Self {
            degree,
            basis_matrix: t,
            inverse,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Decomposes `v` (degree `n` vector polynomial in a basis of scale `scale`).
    pub fn decompose(&self, v: &VectorPoly, scale: f64) -> Result<Decomposition> {
        if v.degree != self.degree {
            return Err(Error::InvalidInput(format!(
                "decomposer of degree {} given a degree {} polynomial",
                self.degree, v.degree
            )));
        }
        Ok(self.decompose_coeffs(&v.coeffs, scale))
    }

    pub(crate) fn decompose_coeffs(&self, v: &[f64], scale: f64) -> Decomposition {
        let x = &self.inverse * DVector::from_column_slice(v);
        let n_grad = poly_dim(self.degree + 1) - 1;
        Decomposition {
            grad_part: x.rows(0, n_grad).iter().map(|c| c * scale).collect(),
            perp_part: x.rows(n_grad, x.len() - n_grad).iter().copied().collect(),
        }
    }

    /// Inverse of [`decompose`](Self::decompose).
    pub fn reassemble(&self, d: &Decomposition, scale: f64) -> VectorPoly {
        let mut x: Vec<f64> = d.grad_part.iter().map(|c| c / scale).collect();
        x.extend_from_slice(&d.perp_part);
        let v = &self.basis_matrix * DVector::from_vec(x);
        VectorPoly {
            degree: self.degree,
            coeffs: v.iter().copied().collect(),
        }
    }
}

/// `H_ij = int_E m_i m_j dE` for the degree-`n` basis, from a monomial table
/// of degree at least `2n`.
pub fn mass_matrix_element(table: &MonomialTable, n: usize) -> Result<DMatrix<f64>> {
    let m = poly_dim(n);
    if table.degree() < 2 * n {
        return Err(Error::InvalidInput(format!(
            "monomial table of degree {} cannot produce a degree {n} mass matrix",
            table.degree()
        )));
    }
    let h = DMatrix::from_fn(m, m, |i, j| {
        let (a, b) = monomial_exponents(i);
        let (c, d) = monomial_exponents(j);
        table.get(a + c, b + d)
    });
    if h.clone().cholesky().is_none() {
        return Err(Error::NotSpd { what: "element mass matrix" });
    }
    Ok(h)
}

/// Scaled monomials of the edge parameter: `((t - t_mid)/|interval|)^i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeBasis {
    pub mid: f64,
    pub length: f64,
    pub degree: usize,
}

impl EdgeBasis {
    pub fn for_edge(edge: &EdgeGeom, degree: usize) -> Self {
        let (a, b) = edge.param_interval();
        Self {
            mid: 0.5 * (a + b),
            length: b - a,
            degree,
        }
    }

    pub fn eval_all(&self, t: f64, out: &mut [f64]) {
        let s = (t - self.mid) / self.length;
        out[0] = 1.0;
        for i in 1..=self.degree {
            out[i] = out[i - 1] * s;
        }
    }

    pub fn eval_poly(&self, coeffs: &[f64], t: f64) -> f64 {
        let s = (t - self.mid) / self.length;
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }
}

/// `M_ij = int_e m_i m_j de` for the mapped edge monomials of degree `k`.
pub fn mass_matrix_edge(edge: &EdgeGeom, k: usize, rule: &GaussLegendre) -> Result<DMatrix<f64>> {
    let basis = EdgeBasis::for_edge(edge, k);
    let mut m = DMatrix::zeros(k + 1, k + 1);
    let mut vals = vec![0.0; k + 1];
    for s in edge.samples(rule)? {
        basis.eval_all(s.t, &mut vals);
        let w = s.weight * s.speed;
        for i in 0..=k {
            for j in 0..=k {
                m[(i, j)] += w * vals[i] * vals[j];
            }
        }
    }
    if m.clone().cholesky().is_none() {
        return Err(Error::NotSpd { what: "edge mass matrix" });
    }
    Ok(m)
}
