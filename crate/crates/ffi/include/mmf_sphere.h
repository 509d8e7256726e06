#ifndef MMF_SPHERE_H
#define MMF_SPHERE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MmfStatus {
  MMF_STATUS_OK = 0,
  MMF_STATUS_NULL_POINTER = 1,
  MMF_STATUS_INVALID_INPUT = 2,
  MMF_STATUS_MESH_FAILURE = 3,
  MMF_STATUS_SOLVER_FAILURE = 4,
  MMF_STATUS_IO = 5,
  MMF_STATUS_BUFFER_TOO_SMALL = 6,
  MMF_STATUS_PANIC = 7,
} MmfStatus;

typedef enum MmfStrategy {
  MMF_STRATEGY_GEODESIC_OPTIMIZED = 0,
  MMF_STRATEGY_NAIVE_PROJECTION = 1,
} MmfStrategy;

// Opaque mesh handle.
typedef struct MmfMesh MmfMesh;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Build a cubed-sphere mesh with `n_per_face`² elements per cube face at geometry order
// `p_geom`. `fixed_order` is the frozen order of the naive strategy and is ignored otherwise.
// On success `*out` owns a new handle.
//
// # Safety
// `out` must be null or valid for a pointer write.
enum MmfStatus mmf_mesh_generate(uint32_t n_per_face,
                                 uint32_t p_geom,
                                 enum MmfStrategy strategy,
                                 uint32_t fixed_order,
                                 struct MmfMesh **out);

// Release a handle. Null is ignored.
//
// # Safety
// `mesh` must be null or a live handle; it is invalid afterwards.
void mmf_mesh_free(struct MmfMesh *mesh);

// # Safety
// `mesh` must be null or a live handle; `out` null or writable.
enum MmfStatus mmf_mesh_element_count(const struct MmfMesh *mesh, size_t *out);

// Control nodes per element, (p_geom + 1)².
//
// # Safety
// `mesh` must be null or a live handle; `out` null or writable.
enum MmfStatus mmf_mesh_nodes_per_element(const struct MmfMesh *mesh, size_t *out);

// Maximum linear edge length.
//
// # Safety
// `mesh` must be null or a live handle; `out` null or writable.
enum MmfStatus mmf_mesh_h(const struct MmfMesh *mesh, double *out);

// Copy control-node coordinates as x, y, z triples, element-major, into `buf` of
// `len` doubles. Needs 3 × elements × nodes-per-element entries.
//
// # Safety
// `mesh` must be null or a live handle; `buf` null or valid for `len` writes.
enum MmfStatus mmf_mesh_copy_nodes(const struct MmfMesh *mesh, double *buf, size_t len);

// RMS radius error at the element vertices.
//
// # Safety
// `mesh` must be null or a live handle; `out` null or writable.
enum MmfStatus mmf_mesh_error(const struct MmfMesh *mesh, double *out);

// RMS radius error over a dense sampling of every element.
//
// # Safety
// `mesh` must be null or a live handle; `out` null or writable.
enum MmfStatus mmf_mesh_gae(const struct MmfMesh *mesh, double *out);

// Write the mesh as JSON to the UTF-8 path `path`.
//
// # Safety
// `mesh` must be null or a live handle; `path` null or a NUL-terminated string.
enum MmfStatus mmf_mesh_write_json(const struct MmfMesh *mesh, const char *path);

// Message of the last failed call on this thread, or null. Valid until the next call.
const char *mmf_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *mmf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MMF_SPHERE_H */
