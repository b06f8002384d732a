#ifndef RHMEMBER_H
#define RHMEMBER_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RhmStatus {
  RHM_STATUS_OK = 0,
  RHM_STATUS_NULL_POINTER = 1,
  RHM_STATUS_INVALID_UTF8 = 2,
  RHM_STATUS_PARSE = 3,
  RHM_STATUS_INVALID_STRUCTURE = 4,
  RHM_STATUS_PANIC = 5,
  RHM_STATUS_NO_ORACLE = 6,
  RHM_STATUS_UNCERTIFIED = 7,
  RHM_STATUS_FAILED = 8,
} RhmStatus;

typedef enum RhmSchedule {
  RHM_SCHEDULE_DIAG = 0,
  RHM_SCHEDULE_ALT = 1,
} RhmSchedule;

typedef enum RhmVerdict {
  RHM_VERDICT_MEMBER = 0,
  RHM_VERDICT_NON_MEMBER = 1,
  RHM_VERDICT_BUDGET_EXHAUSTED = 2,
} RhmVerdict;

/**
 * Stallings graph of a subgroup of a free group.
 */
typedef struct RhmGraph RhmGraph;

/**
 * A group with peripherals and an automatic structure.
 */
typedef struct RhmInstance RhmInstance;

/**
 * Outcome of a relative Stallings computation.
 */
typedef struct RhmLGraph RhmLGraph;

/**
 * An automatic structure, loaded from a bundle or a builtin description.
 */
typedef struct RhmStructure RhmStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty if none. Valid
 * until the next failing call on the same thread.
 */
const char *rhm_last_error(void);

/**
 * # Safety
 * `s` is null or was returned by this library and not yet freed.
 */
void rhm_string_free(char *s);

/**
 * Folds `generators` (comma-separated words) over the generators named in
 * `alphabet` (comma-separated).
 *
 * # Safety
 * String arguments are nul-terminated; `out` is writable.
 */
enum RhmStatus rhm_graph_fold(const char *alphabet, const char *generators, struct RhmGraph **out);

/**
 * # Safety
 * `g` is null or a live graph handle.
 */
void rhm_graph_free(struct RhmGraph *g);

/**
 * # Safety
 * `g` is a live graph handle.
 */
size_t rhm_graph_num_vertices(const struct RhmGraph *g);

/**
 * # Safety
 * `g` is a live graph handle.
 */
size_t rhm_graph_num_edges(const struct RhmGraph *g);

/**
 * # Safety
 * `g` is a live graph handle.
 */
size_t rhm_graph_rank(const struct RhmGraph *g);

/**
 * Index in the free group, or -1 when infinite.
 *
 * # Safety
 * `g` is a live graph handle.
 */
int64_t rhm_graph_index(const struct RhmGraph *g);

/**
 * # Safety
 * `g` is a live graph handle, `word` nul-terminated, `out` writable.
 */
enum RhmStatus rhm_graph_contains(const struct RhmGraph *g, const char *word, bool *out);

/**
 * The graph as JSON; release with [`rhm_string_free`].
 *
 * # Safety
 * `g` is a live graph handle, `out` writable.
 */
enum RhmStatus rhm_graph_to_json(const struct RhmGraph *g, char **out);

/**
 * Loads a bundle (directory or manifest path) or a `builtin:...` description.
 *
 * # Safety
 * `spec` is nul-terminated, `out` writable.
 */
enum RhmStatus rhm_structure_load(const char *spec, struct RhmStructure **out);

/**
 * # Safety
 * `s` is null or a live structure handle.
 */
void rhm_structure_free(struct RhmStructure *s);

/**
 * Normal-form membership test; builtin structures only.
 *
 * # Safety
 * `s` is a live structure handle, strings nul-terminated, `out` writable.
 */
enum RhmStatus rhm_oracle(const struct RhmStructure *s,
                          const char *subgroup,
                          const char *element,
                          bool *out);

/**
 * Runs the relative Stallings computation for at most `budget` iterations.
 * `certified` tells whether the result answers membership queries.
 *
 * # Safety
 * `s` is a live structure handle, strings nul-terminated, outputs writable.
 */
enum RhmStatus rhm_lgraph_compute(const struct RhmStructure *s,
                                  const char *subgroup,
                                  size_t budget,
                                  struct RhmLGraph **out,
                                  bool *certified);

/**
 * # Safety
 * `g` is a live handle, `word` nul-terminated, `out` writable.
 */
enum RhmStatus rhm_lgraph_contains(const struct RhmLGraph *g, const char *word, bool *out);

/**
 * # Safety
 * `g` is null or a live handle.
 */
void rhm_lgraph_free(struct RhmLGraph *g);

/**
 * Builds an instance from presentation JSON text and a structure. The
 * structure handle stays owned by the caller.
 *
 * # Safety
 * `presentation_json` nul-terminated, `s` a live structure handle, `out` writable.
 */
enum RhmStatus rhm_instance_new(const char *presentation_json,
                                const struct RhmStructure *s,
                                struct RhmInstance **out);

/**
 * # Safety
 * `i` is null or a live instance handle.
 */
void rhm_instance_free(struct RhmInstance *i);

/**
 * Decides membership of `element` in the subgroup generated by
 * `subgroup`. If `report` is non-null it receives the JSON report,
 * certificate included; release it with [`rhm_string_free`].
 *
 * # Safety
 * `i` is a live instance handle, strings nul-terminated, `verdict` writable,
 * `report` null or writable.
 */
enum RhmStatus rhm_member(const struct RhmInstance *i,
                          const char *subgroup,
                          const char *element,
                          size_t budget,
                          enum RhmSchedule schedule,
                          enum RhmVerdict *verdict,
                          char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RHMEMBER_H */
