//! C interface to the curvem solver.
//!
//! Objects are passed as opaque handles that the caller releases with the
//! matching `_free` function. Every function returns a [`CurvemStatus`]; on
//! failure a message is available from [`curvem_last_error`] on the same
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use curvem::mesh::{self, Mesh};
use curvem::solver::{assemble, conservation_defect, evaluate, solve, CellFields};
use curvem::verification::{compute_errors, CaseName, ErrorIndicators};
use curvem::vem::Discretization;
use curvem::Error;

/// Result code of every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvemStatus {
    CurvemOk = 0,
    CurvemNullPointer = 1,
    CurvemInvalidArgument = 2,
    CurvemIo = 3,
    CurvemParse = 4,
    CurvemGeometry = 5,
    CurvemTopology = 6,
    CurvemNumerical = 7,
    CurvemPanic = 8,
}

pub const CURVEM_CASE_CURVED_BOUNDARY: u32 = 0;
pub const CURVEM_CASE_CIRCLE_INCLUSION: u32 = 1;
pub const CURVEM_CASE_DOUBLE_INTERFACE: u32 = 2;

/// A mesh handle.
pub struct CurvemMesh {
    mesh: Mesh,
}

/// A solved problem: per-cell polynomial fields, errors and diagnostics.
pub struct CurvemSolution {
    fields: Vec<CellFields>,
    errors: ErrorIndicators,
    stats: CurvemSolveStats,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CurvemMeshInfo {
    pub cells: usize,
    pub edges: usize,
    pub curved_edges: usize,
    /// Mean cell diameter.
    pub h: f64,
    pub total_area: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CurvemSolveStats {
    pub n_velocity: usize,
    pub n_pressure: usize,
    /// Mean cell diameter.
    pub h: f64,
    /// Relative residual of the linear solve.
    pub residual: f64,
    /// Largest per-cell mass balance defect.
    pub conservation: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure {
    status: CurvemStatus,
    message: String,
}

fn status_of(e: &Error) -> CurvemStatus {
    match e {
        Error::Io(_) => CurvemStatus::CurvemIo,
        Error::Parse { .. } => CurvemStatus::CurvemParse,
        Error::Topology(_) => CurvemStatus::CurvemTopology,
        Error::InvalidInput(_) | Error::IndexOutOfRange { .. } | Error::EmptyNaturalBoundary => {
            CurvemStatus::CurvemInvalidArgument
        }
        Error::DegenerateEdge { .. }
        | Error::OpenLoop { .. }
        | Error::NegativeArea { .. }
        | Error::StarPointInvalid
        | Error::InvertedCell { .. }
        | Error::TangentialIntersection { .. }
        | Error::TooManyCrossings { .. }
        | Error::CurveEndsInsideCell { .. } => CurvemStatus::CurvemGeometry,
        _ => CurvemStatus::CurvemNumerical,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            status: status_of(&e),
            message: e.to_string(),
        }
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CurvemStatus {
    let (status, message) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (CurvemStatus::CurvemOk, String::new()),
        Ok(Err(failure)) => (failure.status, failure.message),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            (CurvemStatus::CurvemPanic, format!("panic: {msg}"))
        }
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
    status
}

fn null(what: &str) -> Failure {
    Failure {
        status: CurvemStatus::CurvemNullPointer,
        message: format!("{what} is null"),
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure {
        status: CurvemStatus::CurvemInvalidArgument,
        message: msg.into(),
    }
}

/// # Safety
/// `ptr` must be null or valid for reads of `T`.
unsafe fn as_ref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    unsafe { ptr.as_ref() }.ok_or_else(|| null(what))
}

/// # Safety
/// `ptr` must be null or valid for writes of `T`.
unsafe fn write<T>(ptr: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    unsafe { ptr.write(value) };
    Ok(())
}

/// # Safety
/// `path` must be null or a NUL-terminated string.
unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = unsafe { CStr::from_ptr(path) }
        .to_str()
        .map_err(|_| invalid("path is not valid UTF-8"))?;
    Ok(PathBuf::from(s))
}

fn case_arg(problem: u32) -> Result<CaseName, Failure> {
    match problem {
        CURVEM_CASE_CURVED_BOUNDARY => Ok(CaseName::CurvedBoundary),
        CURVEM_CASE_CIRCLE_INCLUSION => Ok(CaseName::CircleInclusion),
        CURVEM_CASE_DOUBLE_INTERFACE => Ok(CaseName::DoubleInterface),
        _ => Err(invalid(format!("unknown case {problem}"))),
    }
}

fn new_mesh(mesh: Mesh) -> *mut CurvemMesh {
    Box::into_raw(Box::new(CurvemMesh { mesh }))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn curvem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the message of the last failure on this thread into `buf`
/// (truncated to `len - 1` bytes and NUL-terminated) and returns the full
/// message length. `buf` may be null when `len` is 0.
///
/// # Safety
/// `buf` must be valid for writes of `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn curvem_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(msg.as_ptr().cast(), buf, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// Builds the mesh of a built-in case (`CURVEM_CASE_*`) from an `n x n` grid.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn curvem_mesh_build(problem: u32, n: usize, out: *mut *mut CurvemMesh) -> CurvemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let mesh = case_arg(problem)?.build().build_mesh(n)?;
        unsafe { write(out, new_mesh(mesh), "out") }
    })
}

/// Reads a mesh file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn curvem_mesh_load(path: *const c_char, out: *mut *mut CurvemMesh) -> CurvemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let mesh = mesh::load(unsafe { path_arg(path) }?)?;
        unsafe { write(out, new_mesh(mesh), "out") }
    })
}

/// Writes a mesh file.
///
/// # Safety
/// `mesh` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn curvem_mesh_save(mesh: *const CurvemMesh, path: *const c_char) -> CurvemStatus {
    guard(|| {
        let m = unsafe { as_ref(mesh, "mesh") }?;
        mesh::save(&m.mesh, unsafe { path_arg(path) }?)?;
        Ok(())
    })
}

/// New mesh with every curved edge replaced by its chord.
///
/// # Safety
/// `mesh` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn curvem_mesh_straighten(mesh: *const CurvemMesh, out: *mut *mut CurvemMesh) -> CurvemStatus {
    guard(|| {
        let m = unsafe { as_ref(mesh, "mesh") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let straight = m.mesh.straighten()?;
        unsafe { write(out, new_mesh(straight), "out") }
    })
}

/// Size and quality summary of a mesh.
///
/// # Safety
/// `mesh` must be a live handle and `info` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn curvem_mesh_info(mesh: *const CurvemMesh, info: *mut CurvemMeshInfo) -> CurvemStatus {
    guard(|| {
        let m = unsafe { as_ref(mesh, "mesh") }?;
        let r = mesh::validate(&m.mesh)?;
        let value = CurvemMeshInfo {
            cells: r.cell_count,
            edges: r.edge_count,
            curved_edges: r.curved_edge_count,
            h: r.h,
            total_area: r.total_area,
        };
        unsafe { write(info, value, "info") }
    })
}

/// Releases a mesh. Null is ignored.
///
/// # Safety
/// `mesh` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn curvem_mesh_free(mesh: *mut CurvemMesh) {
    if !mesh.is_null() {
        drop(unsafe { Box::from_raw(mesh) });
    }
}

/// Solves the problem of a built-in case (`CURVEM_CASE_*`) on `mesh` with
/// degree `k`.
///
/// # Safety
/// `mesh` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn curvem_solve(
    mesh: *const CurvemMesh,
    problem: u32,
    k: usize,
    out: *mut *mut CurvemSolution,
) -> CurvemStatus {
    guard(|| {
        let m = unsafe { as_ref(mesh, "mesh") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let problem = case_arg(problem)?.build();
        let disc = Discretization::new(k)?;
        let system = assemble(&m.mesh, problem.as_ref(), &disc)?;
        let solution = solve(&system)?;
        let fields = evaluate(&system, &solution);
        let errors = compute_errors(&m.mesh, &fields, problem.as_ref(), k + 6)?;
        let h = system.cells.iter().map(|c| c.basis.scale).sum::<f64>() / system.cells.len().max(1) as f64;
        let stats = CurvemSolveStats {
            n_velocity: system.dofmap.n_velocity(),
            n_pressure: system.dofmap.n_pressure(),
            h,
            residual: solution.residual,
            conservation: conservation_defect(&system, &solution),
        };
        let handle = Box::into_raw(Box::new(CurvemSolution { fields, errors, stats }));
        unsafe { write(out, handle, "out") }
    })
}

/// L2 errors of the projected velocity and of the pressure.
///
/// # Safety
/// `solution` must be a live handle; `e_q` and `e_p` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn curvem_solution_errors(
    solution: *const CurvemSolution,
    e_q: *mut f64,
    e_p: *mut f64,
) -> CurvemStatus {
    guard(|| {
        let s = unsafe { as_ref(solution, "solution") }?;
        if e_q.is_null() || e_p.is_null() {
            return Err(null("error output"));
        }
        unsafe {
            write(e_q, s.errors.e_q, "e_q")?;
            write(e_p, s.errors.e_p, "e_p")
        }
    })
}

/// Solver diagnostics.
///
/// # Safety
/// `solution` must be a live handle and `stats` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn curvem_solution_stats(
    solution: *const CurvemSolution,
    stats: *mut CurvemSolveStats,
) -> CurvemStatus {
    guard(|| {
        let s = unsafe { as_ref(solution, "solution") }?;
        unsafe { write(stats, s.stats, "stats") }
    })
}

/// Discrete pressure of cell `cell` evaluated at `(x, y)`.
///
/// # Safety
/// `solution` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn curvem_solution_pressure(
    solution: *const CurvemSolution,
    cell: usize,
    x: f64,
    y: f64,
    value: *mut f64,
) -> CurvemStatus {
    guard(|| {
        let s = unsafe { as_ref(solution, "solution") }?;
        let f = s
            .fields
            .get(cell)
            .ok_or_else(|| invalid(format!("cell {cell} out of range for {} cells", s.fields.len())))?;
        let p = f.pressure_at(curvem::geometry::Vec2::new(x, y));
        unsafe { write(value, p, "value") }
    })
}

/// Releases a solution. Null is ignored.
///
/// # Safety
/// `solution` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn curvem_solution_free(solution: *mut CurvemSolution) {
    if !solution.is_null() {
        drop(unsafe { Box::from_raw(solution) });
    }
}
