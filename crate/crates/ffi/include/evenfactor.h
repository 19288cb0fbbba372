#ifndef EVENFACTOR_H
#define EVENFACTOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum EfStatus {
  EF_STATUS_OK = 0,
  /**
   * Null pointer, bad node id or undersized buffer.
   */
  EF_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Instance text could not be parsed.
   */
  EF_STATUS_PARSE = 2,
  /**
   * The graph is not odd-cycle symmetric.
   */
  EF_STATUS_ASYMMETRIC = 3,
  /**
   * The arc set is not an even factor of the graph.
   */
  EF_STATUS_REJECTED = 4,
  /**
   * An internal consistency check failed.
   */
  EF_STATUS_INTERNAL = 5,
} EfStatus;

typedef enum EfAlgorithm {
  EF_ALGORITHM_FAST = 0,
  EF_ALGORITHM_PAP = 1,
} EfAlgorithm;

/**
 * Opaque digraph handle.
 */
typedef struct EfGraph EfGraph;

/**
 * Opaque solution handle: the arcs as `(tail, head)` pairs.
 */
typedef struct EfSolution EfSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into this library from the same thread.
 */
const char *ef_last_error(void);

/**
 * New graph with nodes `0..n` and no arcs.
 */
struct EfGraph *ef_graph_new(uint32_t n);

/**
 * # Safety
 * `g` is null or a handle from this library not yet freed.
 */
void ef_graph_free(struct EfGraph *g);

/**
 * # Safety
 * `g` is a live graph handle.
 */
enum EfStatus ef_graph_add_arc(struct EfGraph *g, uint32_t tail, uint32_t head);

/**
 * Parses instance text (`n m` then `m` lines `u v`) into `*out`.
 *
 * # Safety
 * `text` is a NUL-terminated string and `out` is writable.
 */
enum EfStatus ef_graph_from_text(const char *text, struct EfGraph **out);

/**
 * # Safety
 * `g` is a live graph handle.
 */
uint32_t ef_graph_node_count(const struct EfGraph *g);

/**
 * # Safety
 * `g` is a live graph handle.
 */
uint32_t ef_graph_arc_count(const struct EfGraph *g);

/**
 * `Ok` when the graph is odd-cycle symmetric, `Asymmetric` otherwise.
 *
 * # Safety
 * `g` is a live graph handle.
 */
enum EfStatus ef_check(const struct EfGraph *g);

/**
 * Computes a maximum even factor into `*out`.
 *
 * # Safety
 * `g` is a live graph handle and `out` is writable.
 */
enum EfStatus ef_solve(const struct EfGraph *g, enum EfAlgorithm algo, struct EfSolution **out);

/**
 * # Safety
 * `s` is null or a live solution handle.
 */
void ef_solution_free(struct EfSolution *s);

/**
 * Number of arcs in the solution.
 *
 * # Safety
 * `s` is a live solution handle.
 */
size_t ef_solution_size(const struct EfSolution *s);

/**
 * # Safety
 * `s` is a live solution handle.
 */
size_t ef_solution_deficiency(const struct EfSolution *s);

/**
 * Copies the solution arcs into `tails[i], heads[i]`; `cap` is the length of
 * both buffers and must be at least `ef_solution_size(s)`.
 *
 * # Safety
 * `s` is a live solution handle; `tails` and `heads` hold `cap` elements.
 */
enum EfStatus ef_solution_arcs(const struct EfSolution *s,
                               uint32_t *tails,
                               uint32_t *heads,
                               size_t cap);

/**
 * `Ok` when the arcs `(tails[i], heads[i])` form an even factor of `g`.
 *
 * # Safety
 * `g` is a live graph handle; `tails` and `heads` hold `len` elements.
 */
enum EfStatus ef_verify(const struct EfGraph *g,
                        const uint32_t *tails,
                        const uint32_t *heads,
                        size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EVENFACTOR_H */
