//! Discrete inf-sup constant of the velocity/pressure pairing.

use faer::sparse::{SparseColMat, Triplet};
use faer::linalg::solvers::Solve;
use faer::Mat;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{sparse_mul, System};
use crate::error::{Error, Result};
use crate::poly::poly_dim;

/// Result of the Lanczos estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfSupEstimate {
    /// `beta_h`, the square root of the smallest Schur complement eigenvalue.
    pub beta: f64,
    pub iterations: usize,
    /// Change of the smallest Ritz value over the last iteration.
    pub ritz_change: f64,
}

/// Estimates `beta_h` in the norms `||v||_V^2 = a(v, v) + ||div v||^2` and
/// `||p||_{L^2}`: the smallest eigenvalue of `M_p^{-1} B V^{-1} B^T`, where
/// `V` is the matrix of the velocity norm.
pub fn inf_sup_constant(system: &System, max_iterations: usize) -> Result<InfSupEstimate> {
    let dm = &system.dofmap;
    let nv = dm.n_velocity();
    let np = dm.n_pressure();
    let pk = poly_dim(dm.degree());

    let mut v_trip = Vec::new();
    let mut b_trip = Vec::new();
    let mut chol = Vec::with_capacity(system.cells.len());
    for (c, data) in system.cells.iter().enumerate() {
        let l = data
            .mass
            .clone()
            .cholesky()
            .ok_or(Error::NotSpd { what: "pressure mass matrix" })?;
        let div_norm = data.b.transpose() * l.solve(&data.b);
        let local = &data.a + div_norm;
        let p0 = c * pk;
        for (i, gi) in data.dofs.iter().enumerate() {
            let Some(gi) = *gi else { continue };
            for (j, gj) in data.dofs.iter().enumerate() {
                if let Some(gj) = *gj {
                    v_trip.push(Triplet::new(gi, gj, local[(i, j)]));
                }
            }
            for r in 0..pk {
                b_trip.push(Triplet::new(p0 + r, gi, data.b[(r, i)]));
            }
        }
        chol.push(l.l());
    }
    let singular = |e: String| Error::SingularSystem { residual: f64::NAN, detail: e };
    let v = SparseColMat::<usize, f64>::try_new_from_triplets(nv, nv, &v_trip)
        .map_err(|e| singular(format!("{e:?}")))?;
    let b = SparseColMat::<usize, f64>::try_new_from_triplets(np, nv, &b_trip)
        .map_err(|e| singular(format!("{e:?}")))?;
    let bt_trip: Vec<_> = b_trip.iter().map(|t| Triplet::new(t.col, t.row, t.val)).collect();
    let bt = SparseColMat::<usize, f64>::try_new_from_triplets(nv, np, &bt_trip)
        .map_err(|e| singular(format!("{e:?}")))?;
    let lu = v.sp_lu().map_err(|e| singular(format!("velocity norm factorization: {e:?}")))?;

    // y = L^{-1} B V^{-1} B^T L^{-T} x with M_p = L L^T cell by cell.
    let apply = |x: &DVector<f64>| -> DVector<f64> {
        let mut z = vec![0.0; np];
        for (c, l) in chol.iter().enumerate() {
            let seg = x.rows(c * pk, pk).into_owned();
            let w = l.transpose().solve_upper_triangular(&seg).expect("positive diagonal");
            z[c * pk..(c + 1) * pk].copy_from_slice(w.as_slice());
        }
        let rhs = sparse_mul(&bt, &z);
        let sol = lu.solve(&Mat::from_fn(nv, 1, |i, _| rhs[i]));
        let u: Vec<f64> = (0..nv).map(|i| sol[(i, 0)]).collect();
        let y = sparse_mul(&b, &u);
        let mut out = DVector::zeros(np);
        for (c, l) in chol.iter().enumerate() {
            let seg = DVector::from_column_slice(&y[c * pk..(c + 1) * pk]);
            let w = l.solve_lower_triangular(&seg).expect("positive diagonal");
            out.rows_mut(c * pk, pk).copy_from(&w);
        }
        out
    };

    let (lambda, iterations, ritz_change) = lanczos_smallest(np, max_iterations.max(1), apply);
    Ok(InfSupEstimate {
        beta: lambda.max(0.0).sqrt(),
        iterations,
        ritz_change,
    })
}

/// Smallest eigenvalue of a symmetric operator by Lanczos with full
/// reorthogonalization.
fn lanczos_smallest(
    n: usize,
    max_iterations: usize,
    apply: impl Fn(&DVector<f64>) -> DVector<f64>,
) -> (f64, usize, f64) {
    let mut q = DVector::from_fn(n, |i, _| 1.0 + 0.5 * ((i as f64) * 0.618_034).sin());
    q /= q.norm();
    let mut basis: Vec<DVector<f64>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut previous = f64::INFINITY;
    let mut change = f64::INFINITY;
    let mut smallest = f64::NAN;
    let m = max_iterations.min(n);
    for it in 0..m {
        let mut w = apply(&basis[it]);
        let a = basis[it].dot(&w);
        alpha.push(a);
        for _ in 0..2 {
            for u in &basis {
                let c = u.dot(&w);
                w.axpy(-c, u, 1.0);
            }
        }
        smallest = ritz_min(&alpha, &beta);
        change = (smallest - previous).abs();
        previous = smallest;
        let norm = w.norm();
        if it + 1 == m || norm < 1e-12 || (it >= 5 && change <= 1e-10 * smallest.abs().max(1e-300)) {
            return (smallest, it + 1, change);
        }
        beta.push(norm);
        basis.push(w / norm);
    }
    (smallest, m, change)
}

fn ritz_min(alpha: &[f64], beta: &[f64]) -> f64 {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    SymmetricEigen::new(t).eigenvalues.min()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lanczos_finds_smallest_diagonal_entry() {
        let d = DVector::from_fn(40, |i, _| 1.0 + i as f64 * 0.1);
        let (l, _, _) = lanczos_smallest(40, 40, |x| x.component_mul(&d));
        assert!((l - 1.0).abs() < 1e-10);
    }
}
