#ifndef GHNCLAB_H
#define GHNCLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum GhnclabStatus {
  GHNCLAB_STATUS_OK = 0,
  GHNCLAB_STATUS_NULL_POINTER = 1,
  GHNCLAB_STATUS_INVALID_UTF8 = 2,
  GHNCLAB_STATUS_PARSE = 3,
  GHNCLAB_STATUS_INVALID_INPUT = 4,
  GHNCLAB_STATUS_UNSUPPORTED = 5,
  GHNCLAB_STATUS_PANIC = 6,
} GhnclabStatus;

/**
 * Opaque handle to a graph of free groups.
 */
typedef struct GhnclabGraphOfGroups GhnclabGraphOfGroups;

/**
 * Opaque handle to a folded subgroup graph.
 */
typedef struct GhnclabSubgroup GhnclabSubgroup;

/**
 * Summary of one inequality check.
 */
typedef struct GhnclabGhncResult {
  size_t lhs;
  size_t rhs;
  bool holds;
  size_t classical_lhs;
  size_t classical_rhs;
  bool classical_holds;
  size_t components;
} GhnclabGhncResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Owned by the library.
 */
const char *ghnclab_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer previously returned by this library.
 */
void ghnclab_string_free(char *s);

/**
 * Folds the subgroup of F(rank) generated by `count` ASCII words.
 *
 * # Safety
 * `generators` must point to `count` valid C strings; `out` must be writable.
 */
enum GhnclabStatus ghnclab_subgroup_new(size_t rank,
                                        const char *const *generators,
                                        size_t count,
                                        struct GhnclabSubgroup **out_handle);

/**
 * Releases a subgroup handle.
 *
 * # Safety
 * `h` must be null or a handle from this library not yet freed.
 */
void ghnclab_subgroup_free(struct GhnclabSubgroup *h);

/**
 * Rank of the subgroup.
 *
 * # Safety
 * `h` must be a live handle; `out_rank` must be writable.
 */
enum GhnclabStatus ghnclab_subgroup_rank(const struct GhnclabSubgroup *h, size_t *out_rank);

/**
 * Number of vertices of the core graph.
 *
 * # Safety
 * `h` must be a live handle; `out_count` must be writable.
 */
enum GhnclabStatus ghnclab_subgroup_vertices(const struct GhnclabSubgroup *h, size_t *out_count);

/**
 * Index in the ambient free group; 0 means infinite index.
 *
 * # Safety
 * `h` must be a live handle; `out_index` must be writable.
 */
enum GhnclabStatus ghnclab_subgroup_index(const struct GhnclabSubgroup *h, size_t *out_index);

/**
 * Tests whether an ASCII word lies in the subgroup.
 *
 * # Safety
 * `h` must be a live handle, `word` a C string, `out_member` writable.
 */
enum GhnclabStatus ghnclab_subgroup_contains(const struct GhnclabSubgroup *h,
                                             const char *word,
                                             bool *out_member);

/**
 * Graphviz rendering of the core graph.
 *
 * # Safety
 * `h` must be a live handle; `out_dot` must be writable.
 */
enum GhnclabStatus ghnclab_subgroup_dot(const struct GhnclabSubgroup *h, char **out_dot);

/**
 * Intersection of two subgroups of the same free group.
 *
 * # Safety
 * `u`, `v` must be live handles; `out_handle` must be writable.
 */
enum GhnclabStatus ghnclab_intersection(const struct GhnclabSubgroup *u,
                                        const struct GhnclabSubgroup *v,
                                        struct GhnclabSubgroup **out_handle);

/**
 * Runs the strengthened and classical Hanna Neumann checks.
 *
 * # Safety
 * `u`, `v` must be live handles; `out_result` must be writable.
 */
enum GhnclabStatus ghnclab_ghnc_check(const struct GhnclabSubgroup *u,
                                      const struct GhnclabSubgroup *v,
                                      struct GhnclabGhncResult *out_result);

/**
 * Index of the Hall completion and the rank of the resulting cover.
 *
 * # Safety
 * `h` must be a live handle; both out pointers must be writable.
 */
enum GhnclabStatus ghnclab_hall_completion(const struct GhnclabSubgroup *h,
                                           size_t *out_index,
                                           size_t *out_cover_rank);

/**
 * Parses and validates a graph of groups from JSON.
 *
 * # Safety
 * `json` must be a C string; `out_handle` must be writable.
 */
enum GhnclabStatus ghnclab_gog_from_json(const char *json,
                                         struct GhnclabGraphOfGroups **out_handle);

/**
 * Releases a graph-of-groups handle.
 *
 * # Safety
 * `h` must be null or a handle from this library not yet freed.
 */
void ghnclab_gog_free(struct GhnclabGraphOfGroups *h);

/**
 * Euler characteristic of the fundamental group.
 *
 * # Safety
 * `h` must be a live handle; `out_chi` must be writable.
 */
enum GhnclabStatus ghnclab_gog_euler(const struct GhnclabGraphOfGroups *h, int64_t *out_chi);

/**
 * Classification report as a JSON string.
 *
 * # Safety
 * `h` must be a live handle; `out_json` must be writable.
 */
enum GhnclabStatus ghnclab_gog_classify_json(const struct GhnclabGraphOfGroups *h, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GHNCLAB_H */
