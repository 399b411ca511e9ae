//! Manufactured test cases, error indicators and convergence studies.

mod cases;

pub use cases::{
    consistency_defect, CaseName, CircleInclusion, CurvedBoundary, DoubleInterface, InterfaceSample,
    ManufacturedCase, PolynomialCase,
};

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::GaussLegendre;
use crate::mesh::Mesh;
use crate::solver::{
    assemble, conservation_defect, evaluate, inf_sup_constant, solve, CellFields, InfSupEstimate,
};
use crate::vem::{cell_quadrature, Discretization};

/// Whether curved edges are kept or replaced by their chords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryMode {
    WithGeo,
    NoGeo,
}

impl GeometryMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::WithGeo => "withgeo",
            Self::NoGeo => "nogeo",
        }
    }

    /// The mesh to solve on.
    pub fn apply(self, mesh: Mesh) -> Result<Mesh> {
        match self {
            Self::WithGeo => Ok(mesh),
            Self::NoGeo => mesh.straighten(),
        }
    }
}

impl fmt::Display for GeometryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeometryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "withgeo" => Ok(Self::WithGeo),
            "nogeo" => Ok(Self::NoGeo),
            _ => Err(Error::InvalidInput(format!("unknown geometry mode {s:?}"))),
        }
    }
}

/// L2 errors of the projected velocity and of the pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorIndicators {
    /// `(sum_E ||q - Pi q_h||^2_E)^(1/2)`.
    pub e_q: f64,
    /// `(sum_E ||p - p_h||^2_E)^(1/2)`.
    pub e_p: f64,
    /// Distance of `p_h` from the cellwise L2 projection of `p`.
    pub e_p_projected: f64,
}

/// Errors against the exact solution of `case`, integrated with `nodes`
/// Gauss points per fan direction on every cell.
pub fn compute_errors(
    mesh: &Mesh,
    fields: &[CellFields],
    case: &dyn ManufacturedCase,
    nodes: usize,
) -> Result<ErrorIndicators> {
    let rule = GaussLegendre::new(nodes);
    let (mut eq, mut ep, mut epp) = (0.0, 0.0, 0.0);
    for (c, f) in fields.iter().enumerate() {
        let region = mesh.cells()[c].region;
        let quad = cell_quadrature(&mesh.cell_boundary(c), &rule)?;
        let n = f.pressure.len();
        let mut mass = nalgebra::DMatrix::zeros(n, n);
        let mut moments = DVector::zeros(n);
        for &(x, w) in &quad {
            eq += w * (case.velocity(region, x) - f.velocity_at(x)).norm_squared();
            let p = case.pressure(region, x);
            ep += w * (p - f.pressure_at(x)).powi(2);
            let m = DVector::from_vec(f.basis.eval_all(x));
            mass += &m * m.transpose() * w;
            moments += &m * (w * p);
        }
        let proj = mass
            .cholesky()
            .ok_or(Error::SingularGram { cell: c })?
            .solve(&moments);
        let diff = DVector::from_column_slice(&f.pressure) - proj;
        for &(x, w) in &quad {
            epp += w * f.basis.eval_poly(diff.as_slice(), x).powi(2);
        }
    }
    Ok(ErrorIndicators {
        e_q: eq.max(0.0).sqrt(),
        e_p: ep.max(0.0).sqrt(),
        e_p_projected: epp.max(0.0).sqrt(),
    })
}

/// Outcome of one solve of a manufactured case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRun {
    /// Background cells per side.
    pub n: usize,
    /// Mean cell diameter.
    pub h: f64,
    pub errors: ErrorIndicators,
    pub n_velocity: usize,
    pub n_pressure: usize,
    /// Relative residual of the linear solve.
    pub residual: f64,
    /// Largest per-cell mass balance defect.
    pub conservation: f64,
    pub seconds: f64,
}

impl CaseRun {
    pub fn ndof(&self) -> usize {
        self.n_velocity + self.n_pressure
    }
}

/// Solves `case` on `mesh` and measures the errors.
pub fn solve_on_mesh(case: &dyn ManufacturedCase, mesh: &Mesh, disc: &Discretization, n: usize) -> Result<CaseRun> {
    let start = Instant::now();
    let system = assemble(mesh, case, disc)?;
    let solution = solve(&system)?;
    let fields = evaluate(&system, &solution);
    let errors = compute_errors(mesh, &fields, case, disc.degree() + 6)?;
    let h = system.cells.iter().map(|c| c.basis.scale).sum::<f64>() / system.cells.len() as f64;
    Ok(CaseRun {
        n,
        h,
        errors,
        n_velocity: system.dofmap.n_velocity(),
        n_pressure: system.dofmap.n_pressure(),
        residual: solution.residual,
        conservation: conservation_defect(&system, &solution),
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Builds the mesh of size `n`, applies `mode` and solves with degree `k`.
pub fn run_case(case: &dyn ManufacturedCase, n: usize, k: usize, mode: GeometryMode) -> Result<CaseRun> {
    let mesh = mode.apply(case.build_mesh(n)?)?;
    let disc = Discretization::new(k)?;
    solve_on_mesh(case, &mesh, &disc, n)
}

/// Inf-sup estimate of degree `k` on the mesh of size `n`.
pub fn inf_sup_for(case: &dyn ManufacturedCase, n: usize, k: usize, max_iterations: usize) -> Result<InfSupEstimate> {
    let mesh = case.build_mesh(n)?;
    let system = assemble(&mesh, case, &Discretization::new(k)?)?;
    inf_sup_constant(&system, max_iterations)
}

/// Errors on a sequence of meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub case: String,
    pub mode: GeometryMode,
    pub k: usize,
    /// Successful runs by increasing `n`.
    pub rows: Vec<CaseRun>,
    /// First failure, if any, as `(n, message)`.
    pub failure: Option<(usize, String)>,
}

/// `log(e_i / e_{i+1}) / log(h_i / h_{i+1})`.
pub fn observed_rate(h0: f64, e0: f64, h1: f64, e1: f64) -> f64 {
    (e0 / e1).ln() / (h0 / h1).ln()
}

impl ConvergenceReport {
    /// Rates `(q, p)` between each row and its predecessor.
    pub fn rates(&self) -> Vec<Option<(f64, f64)>> {
        let mut out = vec![None];
        for w in self.rows.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            out.push(Some((
                observed_rate(a.h, a.errors.e_q, b.h, b.errors.e_q),
                observed_rate(a.h, a.errors.e_p, b.h, b.errors.e_p),
            )));
        }
        out.truncate(self.rows.len());
        out
    }

    /// Rates between the two finest meshes.
    pub fn last_rates(&self) -> Option<(f64, f64)> {
        self.rates().last().copied().flatten()
    }

    pub fn max_conservation_defect(&self) -> f64 {
        self.rows.iter().map(|r| r.conservation).fold(0.0, f64::max)
    }

    /// Appends one CSV line per row. Rates are empty on the first row.
    pub fn write_csv_rows(&self, out: &mut impl Write) -> std::io::Result<()> {
        for (row, rate) in self.rows.iter().zip(self.rates()) {
            let (rq, rp) = rate.map_or((String::new(), String::new()), |(q, p)| {
                (format!("{q:.16e}"), format!("{p:.16e}"))
            });
            writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e},{},{},{},{:.16e}",
                self.mode,
                self.k,
                row.h,
                row.errors.e_q,
                row.errors.e_p,
                rq,
                rp,
                row.ndof(),
                row.seconds
            )?;
        }
        Ok(())
    }
}

pub const CSV_HEADER: &str = "mode,k,h,e_q,e_p,rate_q,rate_p,ndof,seconds";

/// Writes a header and the rows of every report.
pub fn write_csv(reports: &[ConvergenceReport], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in reports {
        r.write_csv_rows(out)?;
    }
    Ok(())
}

/// Runs `case` on the meshes of the given sizes, using up to `jobs` threads.
pub fn run_convergence(
    case: &dyn ManufacturedCase,
    sizes: &[usize],
    k: usize,
    mode: GeometryMode,
    jobs: usize,
) -> ConvergenceReport {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let results: Vec<Mutex<Option<Result<CaseRun>>>> = sizes.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= sizes.len() {
            break;
        }
        log::info!("{} k={k} {mode} n={}", case.name(), sizes[i]);
        let r = run_case(case, sizes[i], k, mode);
        *results[i].lock().expect("unpoisoned") = Some(r);
    };
    let jobs = jobs.clamp(1, sizes.len().max(1));
    if jobs == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..jobs {
                s.spawn(work);
            }
        });
    }
    let mut report = ConvergenceReport {
        case: case.name().to_string(),
        mode,
        k,
        rows: Vec::new(),
        failure: None,
    };
    for (n, r) in sizes.iter().zip(results) {
        match r.into_inner().expect("unpoisoned") {
            Some(Ok(run)) => report.rows.push(run),
            Some(Err(e)) => {
                report.failure.get_or_insert((*n, e.to_string()));
            }
            None => unreachable!("every size is processed"),
        }
    }
    report
}
