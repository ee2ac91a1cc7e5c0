#ifndef EDGESQ_H
#define EDGESQ_H

/* Generated by cbindgen from edgesq-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible function.
typedef enum EsqStatus {
  ESQ_STATUS_OK = 0,
  ESQ_STATUS_NULL_POINTER = 1,
  ESQ_STATUS_INVALID_ARGUMENT = 2,
  ESQ_STATUS_IO = 3,
  ESQ_STATUS_PARSE = 4,
  ESQ_STATUS_PANIC = 5,
} EsqStatus;

// An undirected weighted graph over point indices.
typedef struct EsqGraph EsqGraph;

// A dense symmetric distance matrix.
typedef struct EsqMatrix EsqMatrix;

// An immutable set of points in R^d.
typedef struct EsqPointSet EsqPointSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns the message from the most recent failing call on this thread, or
// an empty string. The pointer stays valid until the next failing call on
// the same thread; do not free it.
const char *esq_last_error_message(void);

// Frees a string returned by this library. Accepts null.
//
// # Safety
// `s` must have been returned by an edgesq function and not freed before.
void esq_string_free(char *s);

// Creates a point set from `len` points of `dim` row-major coordinates.
//
// # Safety
// `coords` must point to `len * dim` readable doubles; `out` must be a
// valid pointer.
enum EsqStatus esq_point_set_new(const double *coords,
                                 size_t len,
                                 size_t dim,
                                 struct EsqPointSet **out);

// Loads points from a `.csv` or `.json` file.
//
// # Safety
// `path` must be a valid NUL-terminated string; `out` must be a valid
// pointer.
enum EsqStatus esq_point_set_load(const char *path, struct EsqPointSet **out);

// Saves points to a `.csv` or `.json` file.
//
// # Safety
// `ps` must be a live point set handle; `path` must be a valid
// NUL-terminated string.
enum EsqStatus esq_point_set_save(const struct EsqPointSet *ps, const char *path);

// Number of points; 0 for a null handle.
//
// # Safety
// `ps` must be null or a live point set handle.
size_t esq_point_set_len(const struct EsqPointSet *ps);

// Coordinate dimension; 0 for a null handle.
//
// # Safety
// `ps` must be null or a live point set handle.
size_t esq_point_set_dim(const struct EsqPointSet *ps);

// Reads one coordinate of one point.
//
// # Safety
// `ps` must be a live point set handle; `out` must be a valid pointer.
enum EsqStatus esq_point_set_coord(const struct EsqPointSet *ps,
                                   size_t point,
                                   size_t axis,
                                   double *out);

// Releases a point set. Accepts null.
//
// # Safety
// `ps` must be null or a live point set handle; it must not be used after.
void esq_point_set_free(struct EsqPointSet *ps);

// Computes the p-power shortest-path metric (`normalized` raises path
// costs to 1/p).
//
// # Safety
// `ps` must be a live point set handle; `out` must be a valid pointer.
enum EsqStatus esq_power_metric(const struct EsqPointSet *ps,
                                double p,
                                bool normalized,
                                struct EsqMatrix **out);

// Computes the minimax (bottleneck) distance matrix, the normalized
// infinite-power limit.
//
// # Safety
// `ps` must be a live point set handle; `out` must be a valid pointer.
enum EsqStatus esq_minimax_metric(const struct EsqPointSet *ps, struct EsqMatrix **out);

// Matrix side length; 0 for a null handle.
//
// # Safety
// `m` must be null or a live matrix handle.
size_t esq_matrix_n(const struct EsqMatrix *m);

// Reads one matrix entry.
//
// # Safety
// `m` must be a live matrix handle; `out` must be a valid pointer.
enum EsqStatus esq_matrix_get(const struct EsqMatrix *m, size_t i, size_t j, double *out);

// Releases a matrix. Accepts null.
//
// # Safety
// `m` must be null or a live matrix handle; it must not be used after.
void esq_matrix_free(struct EsqMatrix *m);

// Builds the k-nearest-neighbor graph with `|u - v|^weight_power` weights.
//
// # Safety
// `ps` must be a live point set handle; `out` must be a valid pointer.
enum EsqStatus esq_knn_graph(const struct EsqPointSet *ps,
                             size_t k,
                             double weight_power,
                             struct EsqGraph **out);

// Builds the Gabriel graph with squared-length weights.
//
// # Safety
// `ps` must be a live point set handle; `out` must be a valid pointer.
enum EsqStatus esq_gabriel_graph(const struct EsqPointSet *ps, struct EsqGraph **out);

// Builds the Euclidean minimum spanning tree.
//
// # Safety
// `ps` must be a live point set handle; `out` must be a valid pointer.
enum EsqStatus esq_euclidean_mst(const struct EsqPointSet *ps, struct EsqGraph **out);

// Computes the critical edge set of the p-power metric.
//
// # Safety
// `ps` must be a live point set handle; `out` must be a valid pointer.
enum EsqStatus esq_critical_edges(const struct EsqPointSet *ps,
                                  double p,
                                  bool strict,
                                  struct EsqGraph **out);

// Builds a (1 + eps)-spanner of the edge-squared metric; `grid` selects the
// approximate per-pair edge selection instead of the exact one.
//
// # Safety
// `ps` must be a live point set handle; `out` must be a valid pointer.
enum EsqStatus esq_build_spanner(const struct EsqPointSet *ps,
                                 double eps,
                                 bool grid,
                                 struct EsqGraph **out);

// Maximum stretch of the graph's shortest-path closure over the base
// matrix.
//
// # Safety
// `base` and `g` must be live handles; `out_max` must be a valid pointer.
enum EsqStatus esq_stretch(const struct EsqMatrix *base, const struct EsqGraph *g, double *out_max);

// Tests whether the graph is an exact 1-spanner of the edge-squared
// metric; `out_excess` receives the worst relative excess.
//
// # Safety
// `ps` and `g` must be live handles; `out_holds` and `out_excess` must be
// valid pointers.
enum EsqStatus esq_one_spanner_check(const struct EsqPointSet *ps,
                                     const struct EsqGraph *g,
                                     bool *out_holds,
                                     double *out_excess);

// Number of vertices; 0 for a null handle.
//
// # Safety
// `g` must be null or a live graph handle.
size_t esq_graph_n(const struct EsqGraph *g);

// Number of edges; 0 for a null handle.
//
// # Safety
// `g` must be null or a live graph handle.
size_t esq_graph_edge_count(const struct EsqGraph *g);

// Reads edge `index` in canonical `(u, v)` order.
//
// # Safety
// `g` must be a live graph handle; `out_u`, `out_v`, and `out_w` must be
// valid pointers.
enum EsqStatus esq_graph_edge(const struct EsqGraph *g,
                              size_t index,
                              size_t *out_u,
                              size_t *out_v,
                              double *out_w);

// Serializes the graph to its canonical JSON form; the string must be
// released with `esq_string_free`.
//
// # Safety
// `g` must be a live graph handle; `out` must be a valid pointer.
enum EsqStatus esq_graph_to_json(const struct EsqGraph *g, char **out);

// Loads a graph from a JSON file, re-validating all invariants.
//
// # Safety
// `path` must be a valid NUL-terminated string; `out` must be a valid
// pointer.
enum EsqStatus esq_graph_load(const char *path, struct EsqGraph **out);

// Saves a graph as canonical JSON.
//
// # Safety
// `g` must be a live graph handle; `path` must be a valid NUL-terminated
// string.
enum EsqStatus esq_graph_save(const struct EsqGraph *g, const char *path);

// Releases a graph. Accepts null.
//
// # Safety
// `g` must be null or a live graph handle; it must not be used after.
void esq_graph_free(struct EsqGraph *g);

// Euclidean distance from `x` to the nearest sample point.
//
// # Safety
// `ps` must be a live point set handle; `x` must point to `dim` readable
// doubles; `out` must be a valid pointer.
enum EsqStatus esq_nearest_distance(const struct EsqPointSet *ps, const double *x, double *out);

// Evaluates both filtration membership clocks for the query point at scale
// `alpha`; they agree for every input.
//
// # Safety
// `ps` must be a live point set handle; `x` must point to `dim` readable
// doubles; `out_in_f` and `out_in_g` must be valid pointers.
enum EsqStatus esq_filtration_membership(const struct EsqPointSet *ps,
                                         const double *x,
                                         double alpha,
                                         bool *out_in_f,
                                         bool *out_in_g);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EDGESQ_H */
