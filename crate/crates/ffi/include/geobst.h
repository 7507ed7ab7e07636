#ifndef GEOBST_H
#define GEOBST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GeobstStatus {
  GEOBST_STATUS_OK = 0,
  GEOBST_STATUS_INVALID_ARGUMENT = 1,
  GEOBST_STATUS_RESOURCE_LIMIT = 2,
  GEOBST_STATUS_PARSE = 3,
  GEOBST_STATUS_NULL_POINTER = 4,
  GEOBST_STATUS_PANIC = 5,
} GeobstStatus;

typedef struct GeobstSequence GeobstSequence;

typedef struct GeobstTrace GeobstTrace;

typedef struct GeobstTree GeobstTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread. Valid until the next
 failing call on the same thread; do not free.
 */
const char *geobst_last_error(void);

/*
 Frees a string returned by a `*_to_text` function. Null is ignored.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void geobst_string_free(char *s);

/*
 Builds a sequence over keys `1..=n` from `m` keys.

 # Safety
 `keys` must point to `m` readable values; `out_seq` must be writable.
 */
enum GeobstStatus geobst_sequence_new(size_t n,
                                      const size_t *keys,
                                      size_t m,
                                      struct GeobstSequence **out_seq);

/*
 Generates a sequence of the named class (as in the `gen` command).

 # Safety
 `class_name` must be a NUL-terminated string; `out_seq` must be writable.
 */
enum GeobstStatus geobst_generate(const char *class_name,
                                  size_t n,
                                  size_t k,
                                  uint64_t seed,
                                  struct GeobstSequence **out_seq);

/*
 # Safety
 `s` must be a NUL-terminated string; `out_seq` must be writable.
 */
enum GeobstStatus geobst_sequence_from_text(const char *s, struct GeobstSequence **out_seq);

/*
 # Safety
 `seq` must be a live handle; `out_text` must be writable.
 */
enum GeobstStatus geobst_sequence_to_text(const struct GeobstSequence *seq, char **out_text);

/*
 Number of accesses.

 # Safety
 `seq` must be a live handle; `out_len` must be writable.
 */
enum GeobstStatus geobst_sequence_len(const struct GeobstSequence *seq, size_t *out_len);

/*
 # Safety
 `seq` must come from this library, or be null.
 */
void geobst_sequence_free(struct GeobstSequence *seq);

/*
 Canonical decomposition tree of a permutation.

 # Safety
 `seq` must be a live handle; `out_tree` must be writable.
 */
enum GeobstStatus geobst_tree_decompose(const struct GeobstSequence *seq,
                                        struct GeobstTree **out_tree);

/*
 Parses the nested `(skeleton | child ...)` form.

 # Safety
 `s` must be a NUL-terminated string; `out_tree` must be writable.
 */
enum GeobstStatus geobst_tree_from_text(const char *s, struct GeobstTree **out_tree);

/*
 # Safety
 `tree` must be a live handle; `out_text` must be writable.
 */
enum GeobstStatus geobst_tree_to_text(const struct GeobstTree *tree, char **out_text);

/*
 # Safety
 `tree` must come from this library, or be null.
 */
void geobst_tree_free(struct GeobstTree *tree);

/*
 Runs Greedy. `initial` is `none`, `balanced`, `random:SEED` or
 `preorder:LIST`; null means `none`.

 # Safety
 `seq` must be a live handle, `initial` null or NUL-terminated, and
 `out_trace` writable.
 */
enum GeobstStatus geobst_run_greedy(const struct GeobstSequence *seq,
                                    const char *initial,
                                    struct GeobstTrace **out_trace);

/*
 Runs RGreedy with `tree`, or the canonical tree when `tree` is null.

 # Safety
 `seq` must be a live handle, `tree` null or live, `out_trace` writable.
 */
enum GeobstStatus geobst_run_rgreedy(const struct GeobstSequence *seq,
                                     const struct GeobstTree *tree,
                                     struct GeobstTrace **out_trace);

/*
 Number of touch points, initial-tree stacks excluded.

 # Safety
 `trace` must be a live handle; `out_cost` must be writable.
 */
enum GeobstStatus geobst_trace_cost(const struct GeobstTrace *trace, size_t *out_cost);

/*
 Whether touch points plus initial stacks form a satisfied set.

 # Safety
 `trace` must be a live handle; `out_ok` must be writable.
 */
enum GeobstStatus geobst_trace_is_satisfied(const struct GeobstTrace *trace, bool *out_ok);

/*
 # Safety
 `trace` must be a live handle; `out_text` must be writable.
 */
enum GeobstStatus geobst_trace_to_text(const struct GeobstTrace *trace, char **out_text);

/*
 # Safety
 `trace` must come from this library, or be null.
 */
void geobst_trace_free(struct GeobstTrace *trace);

/*
 Exact OPT for `n <= 8`. When the node cap stops the search, returns
 `GEOBST_STATUS_RESOURCE_LIMIT` with the Greedy upper bound in
 `out_cost` and `out_exact` set to false.

 # Safety
 `seq` must be a live handle; `out_cost` and `out_exact` writable.
 */
enum GeobstStatus geobst_opt(const struct GeobstSequence *seq,
                             uint64_t node_cap,
                             size_t *out_cost,
                             bool *out_exact);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEOBST_H */
