use std::ffi::{CStr, CString};
use std::ptr;

use curvem_ffi::*;

fn last_error() -> String {
    let len = unsafe { curvem_last_error(ptr::null_mut(), 0) };
    let mut buf = vec![0 as std::ffi::c_char; len + 1];
    unsafe { curvem_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string()
}

#[test]
fn build_solve_and_query() {
    let mut mesh = ptr::null_mut();
    assert_eq!(unsafe { curvem_mesh_build(CURVEM_CASE_CIRCLE_INCLUSION, 4, &mut mesh) }, CurvemStatus::CurvemOk);
    let mut info = CurvemMeshInfo::default();
    assert_eq!(unsafe { curvem_mesh_info(mesh, &mut info) }, CurvemStatus::CurvemOk);
    assert!(info.curved_edges > 0);
    assert!((info.total_area - 4.0).abs() < 1e-12);

    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { curvem_solve(mesh, CURVEM_CASE_CIRCLE_INCLUSION, 1, &mut sol) }, CurvemStatus::CurvemOk);
    let (mut eq, mut ep) = (0.0, 0.0);
    assert_eq!(unsafe { curvem_solution_errors(sol, &mut eq, &mut ep) }, CurvemStatus::CurvemOk);
    assert!(eq > 0.0 && eq < 0.1 && ep > 0.0 && ep < 0.1);
    let mut stats = CurvemSolveStats::default();
    assert_eq!(unsafe { curvem_solution_stats(sol, &mut stats) }, CurvemStatus::CurvemOk);
    assert!(stats.residual <= 1e-10 && stats.conservation <= 1e-9);
    assert_eq!(stats.n_pressure, 3 * info.cells);

    let mut p = 0.0;
    assert_eq!(unsafe { curvem_solution_pressure(sol, 0, -0.9, -0.9, &mut p) }, CurvemStatus::CurvemOk);
    assert!(p.is_finite());
    assert_eq!(
        unsafe { curvem_solution_pressure(sol, info.cells, 0.0, 0.0, &mut p) },
        CurvemStatus::CurvemInvalidArgument
    );
    assert!(last_error().contains("out of range"));

    let mut straight = ptr::null_mut();
    assert_eq!(unsafe { curvem_mesh_straighten(mesh, &mut straight) }, CurvemStatus::CurvemOk);
    let mut sinfo = CurvemMeshInfo::default();
    assert_eq!(unsafe { curvem_mesh_info(straight, &mut sinfo) }, CurvemStatus::CurvemOk);
    assert_eq!(sinfo.curved_edges, 0);
    assert_eq!(sinfo.cells, info.cells);

    unsafe {
        curvem_solution_free(sol);
        curvem_mesh_free(straight);
        curvem_mesh_free(mesh);
    }
}

#[test]
fn save_and_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("m.mesh").to_str().unwrap()).unwrap();
    let mut mesh = ptr::null_mut();
    assert_eq!(unsafe { curvem_mesh_build(CURVEM_CASE_DOUBLE_INTERFACE, 4, &mut mesh) }, CurvemStatus::CurvemOk);
    assert_eq!(unsafe { curvem_mesh_save(mesh, path.as_ptr()) }, CurvemStatus::CurvemOk);
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { curvem_mesh_load(path.as_ptr(), &mut loaded) }, CurvemStatus::CurvemOk);
    let (mut a, mut b) = (CurvemMeshInfo::default(), CurvemMeshInfo::default());
    unsafe {
        curvem_mesh_info(mesh, &mut a);
        curvem_mesh_info(loaded, &mut b);
        curvem_mesh_free(mesh);
        curvem_mesh_free(loaded);
    }
    assert_eq!(a, b);
}

#[test]
fn errors_are_reported_with_codes() {
    let mut mesh = ptr::null_mut();
    assert_eq!(unsafe { curvem_mesh_build(7, 4, &mut mesh) }, CurvemStatus::CurvemInvalidArgument);
    assert!(last_error().contains("unknown case"));
    assert_eq!(unsafe { curvem_mesh_build(0, 4, ptr::null_mut()) }, CurvemStatus::CurvemNullPointer);
    assert_eq!(unsafe { curvem_mesh_info(ptr::null(), ptr::null_mut()) }, CurvemStatus::CurvemNullPointer);

    let missing = CString::new("/nonexistent/dir/m.mesh").unwrap();
    assert_eq!(unsafe { curvem_mesh_load(missing.as_ptr(), &mut mesh) }, CurvemStatus::CurvemIo);
    assert!(mesh.is_null());

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mesh");
    std::fs::write(&bad, "VERTICES 1\nnot a number\n").unwrap();
    let bad = CString::new(bad.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { curvem_mesh_load(bad.as_ptr(), &mut mesh) }, CurvemStatus::CurvemParse);
    assert!(last_error().contains("line"));

    // A successful call clears the message.
    assert_eq!(unsafe { curvem_mesh_build(0, 2, &mut mesh) }, CurvemStatus::CurvemOk);
    assert!(last_error().is_empty());
    unsafe { curvem_mesh_free(mesh) };
}

#[test]
fn version_and_truncation() {
    let v = unsafe { CStr::from_ptr(curvem_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let mut mesh = ptr::null_mut();
    unsafe { curvem_mesh_build(9, 1, &mut mesh) };
    let mut buf = [1 as std::ffi::c_char; 4];
    let full = unsafe { curvem_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(full > 3);
    assert_eq!(buf[3], 0);
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/curvem.h")).unwrap();
    for name in [
        "curvem_mesh_build",
        "curvem_mesh_load",
        "curvem_mesh_save",
        "curvem_mesh_straighten",
        "curvem_mesh_info",
        "curvem_mesh_free",
        "curvem_solve",
        "curvem_solution_errors",
        "curvem_solution_stats",
        "curvem_solution_pressure",
        "curvem_solution_free",
        "curvem_last_error",
        "curvem_version",
        "CURVEM_NULL_POINTER",
        "CURVEM_CASE_CIRCLE_INCLUSION",
        "typedef struct CurvemMesh CurvemMesh",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
