//! Global numbering, saddle-point assembly, the sparse direct solve and the
//! evaluation of the discrete fields.

mod infsup;

pub use infsup::{inf_sup_constant, InfSupEstimate};

use faer::sparse::{SparseColMat, Triplet};
use faer::linalg::solvers::Solve;
use faer::Mat;
use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::mesh::{EdgeTag, Mesh};
use crate::poly::{poly_dim, poly_dim_below, ScaledBasis};
use crate::vem::{Discretization, LocalElement};

/// Coefficients and data of a Darcy problem
/// `mu kappa^{-1} q + grad p = 0`, `-div q = f`, `p = pbar` on natural edges.
pub trait DarcyProblem: Sync {
    fn mu(&self, _region: usize, _x: Vec2) -> f64 {
        1.0
    }

    fn kappa(&self, region: usize, x: Vec2) -> Matrix2<f64>;

    /// Whether `mu` and `kappa` are constant inside each region.
    fn coefficients_are_constant(&self) -> bool {
        true
    }

    fn source(&self, region: usize, x: Vec2) -> f64;

    /// Pressure imposed on natural boundary edges of a cell in `region`.
    fn boundary_pressure(&self, region: usize, x: Vec2) -> f64;
}

/// `mu kappa^{-1}` at `x`.
pub fn resistivity(problem: &dyn DarcyProblem, region: usize, x: Vec2) -> Matrix2<f64> {
    let kappa = problem.kappa(region, x);
    let inv = kappa.try_inverse().unwrap_or_else(|| Matrix2::from_element(f64::NAN));
    inv * problem.mu(region, x)
}

/// Global indices of the unknowns. Velocity unknowns come first (edge
/// moments of all non-essential edges, then the interior moments cell by
/// cell), followed by the pressure coefficients cell by cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    k: usize,
    edge_start: Vec<Option<usize>>,
    cell_start: Vec<usize>,
    n_velocity: usize,
    n_cells: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh, k: usize) -> Self {
        let mut next = 0;
        let edge_start = mesh
            .edges()
            .iter()
            .map(|e| {
                if e.tag == EdgeTag::Essential {
                    None
                } else {
                    next += k + 1;
                    Some(next - k - 1)
                }
            })
            .collect();
        let per_cell = poly_dim(k) - 1 + poly_dim_below(k);
        let cell_start = (0..mesh.num_cells())
            .map(|_| {
                next += per_cell;
                next - per_cell
            })
            .collect();
        Self {
            k,
            edge_start,
            cell_start,
            n_velocity: next,
            n_cells: mesh.num_cells(),
        }
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn n_velocity(&self) -> usize {
        self.n_velocity
    }

    pub fn n_pressure(&self) -> usize {
        self.n_cells * poly_dim(self.k)
    }

    pub fn len(&self) -> usize {
        self.n_velocity + self.n_pressure()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// First global index of the moments of edge `e`, `None` if essential.
    pub fn edge_dofs(&self, e: usize) -> Option<usize> {
        self.edge_start[e]
    }

    /// Global velocity index of every local DoF of cell `c`.
    pub fn cell_velocity_dofs(&self, mesh: &Mesh, c: usize) -> Vec<Option<usize>> {
        let k = self.k;
        let mut out = Vec::new();
        for u in &mesh.cells()[c].edges {
            match self.edge_start[u.edge] {
                Some(s) => out.extend((s..s + k + 1).map(Some)),
                None => out.extend(std::iter::repeat_n(None, k + 1)),
            }
        }
        let per_cell = poly_dim(k) - 1 + poly_dim_below(k);
        out.extend((self.cell_start[c]..self.cell_start[c] + per_cell).map(Some));
        out
    }

    /// Global index of the first pressure coefficient of cell `c`.
    pub fn pressure_start(&self, c: usize) -> usize {
        self.n_velocity + c * poly_dim(self.k)
    }
}

/// Per-cell data kept after assembly for post-processing.
#[derive(Debug, Clone)]
pub struct CellData {
    pub basis: ScaledBasis,
    pub area: f64,
    pub projector: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    /// `int_E f m_j`.
    pub load: Vec<f64>,
    pub dofs: Vec<Option<usize>>,
}

/// The assembled block system `[[A, B^T], [B, 0]] (q, p) = (g, f)`.
#[derive(Debug, Clone)]
pub struct System {
    pub dofmap: DofMap,
    pub triplets: Vec<Triplet<usize, usize, f64>>,
    pub rhs: Vec<f64>,
    pub cells: Vec<CellData>,
}

impl System {
    pub fn size(&self) -> usize {
        self.dofmap.len()
    }

    pub fn matrix(&self) -> Result<SparseColMat<usize, f64>> {
        let n = self.size();
        SparseColMat::try_new_from_triplets(n, n, &self.triplets)
            .map_err(|e| Error::SingularSystem { residual: f64::NAN, detail: format!("{e:?}") })
    }
}

/// Assembles the saddle-point system of degree `disc.degree()`.
pub fn assemble(mesh: &Mesh, problem: &dyn DarcyProblem, disc: &Discretization) -> Result<System> {
    if !mesh.edges().iter().any(|e| e.tag == EdgeTag::Natural) {
        return Err(Error::EmptyNaturalBoundary);
    }
    let k = disc.degree();
    let pk = poly_dim(k);
    let dofmap = DofMap::new(mesh, k);
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; dofmap.len()];
    let mut cells = Vec::with_capacity(mesh.num_cells());
    let constant = problem.coefficients_are_constant();
    for c in 0..mesh.num_cells() {
        let region = mesh.cells()[c].region;
        let boundary = mesh.cell_boundary(c);
        let el = LocalElement::new(disc, c, &boundary)?;
        let weight = |x: Vec2| resistivity(problem, region, x);
        let m = el.matrices(&weight, constant)?;
        let dofs = dofmap.cell_velocity_dofs(mesh, c);
        let p0 = dofmap.pressure_start(c);
        for (i, gi) in dofs.iter().enumerate() {
            let Some(gi) = *gi else { continue };
            for (j, gj) in dofs.iter().enumerate() {
                if let Some(gj) = *gj {
                    triplets.push(Triplet::new(gi, gj, m.a[(i, j)]));
                }
            }
            for r in 0..pk {
                let v = m.b[(r, i)];
                if v != 0.0 {
                    triplets.push(Triplet::new(p0 + r, gi, v));
                    triplets.push(Triplet::new(gi, p0 + r, v));
                }
            }
        }
        let load = el.load_vector(&|x| problem.source(region, x));
        for (r, v) in load.iter().enumerate() {
            rhs[p0 + r] += v;
        }
        let layout = el.layout();
        for (le, u) in mesh.cells()[c].edges.iter().enumerate() {
            if mesh.edges()[u.edge].tag != EdgeTag::Natural {
                continue;
            }
            let g = el.boundary_load(le, &|x| problem.boundary_pressure(region, x));
            for (i, v) in layout.edge(le).zip(g) {
                if let Some(gi) = dofs[i] {
                    rhs[gi] += v;
                }
            }
        }
        cells.push(CellData {
            basis: *el.basis(),
            area: el.area(),
            projector: m.projector,
            b: m.b,
            a: m.a,
            mass: el.mass().clone(),
            load,
            dofs,
        });
    }
    Ok(System {
        dofmap,
        triplets,
        rhs,
        cells,
    })
}

/// Solver output.
#[derive(Debug, Clone)]
pub struct Solution {
    pub velocity: Vec<f64>,
    pub pressure: Vec<f64>,
    /// `||K x - b|| / ||b||` after refinement.
    pub residual: f64,
    pub refinement_steps: usize,
    pub nonzeros: usize,
}

/// `y = K x` for a column-major sparse matrix.
pub(crate) fn sparse_mul(a: &SparseColMat<usize, f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.nrows()];
    let cp = a.symbolic().col_ptr();
    let ri = a.symbolic().row_idx();
    let v = a.val();
    for j in 0..a.ncols() {
        let xj = x[j];
        if xj == 0.0 {
            continue;
        }
        for p in cp[j]..cp[j + 1] {
            y[ri[p]] += v[p] * xj;
        }
    }
    y
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves the assembled system by sparse LU with iterative refinement.
pub fn solve(system: &System) -> Result<Solution> {
    let n = system.size();
    let k = system.matrix()?;
    let nonzeros = k.compute_nnz();
    let lu = k.sp_lu().map_err(|e| Error::SingularSystem {
        residual: f64::NAN,
        detail: format!("factorization failed: {e:?}"),
    })?;
    let b = &system.rhs;
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    let mut residual = 0.0;
    let mut steps = 0;
    if bnorm > 0.0 {
        let mut r = b.clone();
        loop {
            let rhs = Mat::from_fn(n, 1, |i, _| r[i]);
            let dx = lu.solve(&rhs);
            for (xi, i) in x.iter_mut().zip(0..n) {
                *xi += dx[(i, 0)];
            }
            let kx = sparse_mul(&k, &x);
            r = b.iter().zip(&kx).map(|(bi, ki)| bi - ki).collect();
            let rel = norm(&r) / bnorm;
            if !rel.is_finite() {
                return Err(Error::SingularSystem {
                    residual: rel,
                    detail: "non-finite solution".into(),
                });
            }
            let improved = rel < 0.5 * residual || steps == 0;
            residual = rel;
            if rel <= 1e-14 || steps >= 4 || !improved {
                break;
            }
            steps += 1;
        }
    }
    log::debug!("solved {n} unknowns, {nonzeros} nonzeros, residual {residual:e} after {steps} refinements");
    if !(residual <= 1e-10) {
        return Err(Error::SingularSystem {
            residual,
            detail: format!("relative residual above 1e-10 with {n} unknowns"),
        });
    }
    let nv = system.dofmap.n_velocity();
    Ok(Solution {
        pressure: x[nv..].to_vec(),
        velocity: x[..nv].to_vec(),
        residual,
        refinement_steps: steps,
        nonzeros,
    })
}

/// Polynomial fields on one cell.
#[derive(Debug, Clone)]
pub struct CellFields {
    pub basis: ScaledBasis,
    /// Projected velocity, `x` block then `y` block.
    pub velocity: Vec<f64>,
    pub pressure: Vec<f64>,
}

impl CellFields {
    pub fn velocity_at(&self, x: Vec2) -> Vec2 {
        let pk = self.pressure.len();
        let vals = self.basis.eval_all(x);
        let vx = self.velocity[..pk].iter().zip(&vals).map(|(a, b)| a * b).sum();
        let vy = self.velocity[pk..].iter().zip(&vals).map(|(a, b)| a * b).sum();
        Vec2::new(vx, vy)
    }

    pub fn pressure_at(&self, x: Vec2) -> f64 {
        self.basis.eval_poly(&self.pressure, x)
    }
}

/// Local DoF values of the discrete velocity on cell `c` (zero on essential edges).
pub fn local_velocity(system: &System, solution: &Solution, c: usize) -> Vec<f64> {
    system.cells[c]
        .dofs
        .iter()
        .map(|d| d.map_or(0.0, |i| solution.velocity[i]))
        .collect()
}

/// Projected velocity and pressure polynomials on every cell.
pub fn evaluate(system: &System, solution: &Solution) -> Vec<CellFields> {
    let pk = poly_dim(system.dofmap.degree());
    system
        .cells
        .iter()
        .enumerate()
        .map(|(c, data)| {
            let q = DVector::from_vec(local_velocity(system, solution, c));
            let p0 = c * pk;
            CellFields {
                basis: data.basis,
                velocity: (&data.projector * q).iter().copied().collect(),
                pressure: solution.pressure[p0..p0 + pk].to_vec(),
            }
        })
        .collect()
}

/// Largest per-cell mass balance defect `|int_E div q_h + int_E f|`.
pub fn conservation_defect(system: &System, solution: &Solution) -> f64 {
    (0..system.cells.len())
        .map(|c| {
            let data = &system.cells[c];
            let q = DVector::from_vec(local_velocity(system, solution, c));
            let div_moment = -(data.b.row(0) * q)[(0, 0)];
            (div_moment + data.load[0]).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::square_grid;

    struct Constant;

    impl DarcyProblem for Constant {
        fn kappa(&self, _: usize, _: Vec2) -> Matrix2<f64> {
            Matrix2::identity()
        }
        fn source(&self, _: usize, _: Vec2) -> f64 {
            0.0
        }
        fn boundary_pressure(&self, _: usize, _: Vec2) -> f64 {
            2.5
        }
    }

    #[test]
    fn counts() {
        let one = square_grid(1, Vec2::zeros(), Vec2::new(1.0, 1.0)).unwrap();
        let d = DofMap::new(&one, 0);
        assert_eq!((d.n_velocity(), d.n_pressure()), (4, 1));
        let two = square_grid(2, Vec2::zeros(), Vec2::new(1.0, 1.0)).unwrap();
        let d = DofMap::new(&two, 1);
        assert_eq!((d.n_velocity(), d.n_pressure()), (36, 12));
    }

    #[test]
    fn all_essential_is_rejected() {
        let mut m = square_grid(2, Vec2::zeros(), Vec2::new(1.0, 1.0)).unwrap();
        m.set_boundary_tags(|_| EdgeTag::Essential);
        let disc = Discretization::new(0).unwrap();
        assert!(matches!(assemble(&m, &Constant, &disc), Err(Error::EmptyNaturalBoundary)));
    }

    #[test]
    fn constant_pressure_is_reproduced() {
        let m = square_grid(3, Vec2::zeros(), Vec2::new(1.0, 1.0)).unwrap();
        for k in 0..=2 {
            let disc = Discretization::new(k).unwrap();
            let sys = assemble(&m, &Constant, &disc).unwrap();
            let sol = solve(&sys).unwrap();
            assert!(sol.velocity.iter().all(|v| v.abs() < 1e-12));
            let fields = evaluate(&sys, &sol);
            for f in &fields {
                assert!((f.pressure_at(f.basis.center) - 2.5).abs() < 1e-12);
            }
        }
    }
}
