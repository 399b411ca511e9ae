#ifndef CURVEM_H
#define CURVEM_H

/* Generated by cbindgen from the curvem-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CURVEM_CASE_CURVED_BOUNDARY 0

#define CURVEM_CASE_CIRCLE_INCLUSION 1

#define CURVEM_CASE_DOUBLE_INTERFACE 2

/**
 * Result code of every entry point.
 */
typedef enum CurvemStatus {
  CURVEM_OK = 0,
  CURVEM_NULL_POINTER = 1,
  CURVEM_INVALID_ARGUMENT = 2,
  CURVEM_IO = 3,
  CURVEM_PARSE = 4,
  CURVEM_GEOMETRY = 5,
  CURVEM_TOPOLOGY = 6,
  CURVEM_NUMERICAL = 7,
  CURVEM_PANIC = 8,
} CurvemStatus;

/**
 * A mesh handle.
 */
typedef struct CurvemMesh CurvemMesh;

/**
 * A solved problem: per-cell polynomial fields, errors and diagnostics.
 */
typedef struct CurvemSolution CurvemSolution;

typedef struct CurvemMeshInfo {
  size_t cells;
  size_t edges;
  size_t curved_edges;
  /**
   * Mean cell diameter.
   */
  double h;
  double total_area;
} CurvemMeshInfo;

typedef struct CurvemSolveStats {
  size_t n_velocity;
  size_t n_pressure;
  /**
   * Mean cell diameter.
   */
  double h;
  /**
   * Relative residual of the linear solve.
   */
  double residual;
  /**
   * Largest per-cell mass balance defect.
   */
  double conservation;
} CurvemSolveStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *curvem_version(void);

/**
 * Copies the message of the last failure on this thread into `buf`
 * (truncated to `len - 1` bytes and NUL-terminated) and returns the full
 * message length. `buf` may be null when `len` is 0.
 *
 * # Safety
 * `buf` must be valid for writes of `len` bytes.
 */
size_t curvem_last_error(char *buf, size_t len);

/**
 * Builds the mesh of a built-in case (`CURVEM_CASE_*`) from an `n x n` grid.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CurvemStatus curvem_mesh_build(uint32_t problem, size_t n, struct CurvemMesh **out);

/**
 * Reads a mesh file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid for writes.
 */
enum CurvemStatus curvem_mesh_load(const char *path, struct CurvemMesh **out);

/**
 * Writes a mesh file.
 *
 * # Safety
 * `mesh` must be a live handle and `path` a NUL-terminated string.
 */
enum CurvemStatus curvem_mesh_save(const struct CurvemMesh *mesh, const char *path);

/**
 * New mesh with every curved edge replaced by its chord.
 *
 * # Safety
 * `mesh` must be a live handle and `out` valid for writes.
 */
enum CurvemStatus curvem_mesh_straighten(const struct CurvemMesh *mesh, struct CurvemMesh **out);

/**
 * Size and quality summary of a mesh.
 *
 * # Safety
 * `mesh` must be a live handle and `info` valid for writes.
 */
enum CurvemStatus curvem_mesh_info(const struct CurvemMesh *mesh, struct CurvemMeshInfo *info);

/**
 * Releases a mesh. Null is ignored.
 *
 * # Safety
 * `mesh` must be null or a handle not yet freed.
 */
void curvem_mesh_free(struct CurvemMesh *mesh);

/**
 * Solves the problem of a built-in case (`CURVEM_CASE_*`) on `mesh` with
 * degree `k`.
 *
 * # Safety
 * `mesh` must be a live handle and `out` valid for writes.
 */
enum CurvemStatus curvem_solve(const struct CurvemMesh *mesh,
                               uint32_t problem,
                               size_t k,
                               struct CurvemSolution **out);

/**
 * L2 errors of the projected velocity and of the pressure.
 *
 * # Safety
 * `solution` must be a live handle; `e_q` and `e_p` valid for writes.
 */
enum CurvemStatus curvem_solution_errors(const struct CurvemSolution *solution,
                                         double *e_q,
                                         double *e_p);

/**
 * Solver diagnostics.
 *
 * # Safety
 * `solution` must be a live handle and `stats` valid for writes.
 */
enum CurvemStatus curvem_solution_stats(const struct CurvemSolution *solution,
                                        struct CurvemSolveStats *stats);

/**
 * Discrete pressure of cell `cell` evaluated at `(x, y)`.
 *
 * # Safety
 * `solution` must be a live handle and `value` valid for writes.
 */
enum CurvemStatus curvem_solution_pressure(const struct CurvemSolution *solution,
                                           size_t cell,
                                           double x,
                                           double y,
                                           double *value);

/**
 * Releases a solution. Null is ignored.
 *
 * # Safety
 * `solution` must be null or a handle not yet freed.
 */
void curvem_solution_free(struct CurvemSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CURVEM_H */
