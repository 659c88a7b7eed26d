#ifndef QTG_QAOA_H
#define QTG_QAOA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define QK_ENGINE_QTG 0

#define QK_ENGINE_COPULA 1

/**
 * Result code of every fallible call.
 */
typedef enum QkStatus {
  QK_STATUS_OK = 0,
  QK_STATUS_NULL_POINTER = 1,
  QK_STATUS_INVALID_ARGUMENT = 2,
  QK_STATUS_PARSE = 3,
  QK_STATUS_RESOURCE_LIMIT = 4,
  QK_STATUS_DEGENERATE_INSTANCE = 5,
  QK_STATUS_INVALID_STATE = 6,
  QK_STATUS_IO = 7,
  QK_STATUS_PANIC = 8,
} QkStatus;

/**
 * Opaque knapsack instance.
 */
typedef struct QkInstance QkInstance;

/**
 * Opaque engine bound to an instance.
 */
typedef struct QkProblem QkProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds an instance from `n` profits and weights.
 *
 * # Safety
 * `profits` and `weights` must point to `n` readable values; `out` must be
 * writable.
 */
enum QkStatus qk_instance_new(const uint64_t *profits,
                              const uint64_t *weights,
                              size_t n,
                              uint64_t capacity,
                              struct QkInstance **out);

/**
 * Parses the plain-text instance format from a NUL-terminated string.
 *
 * # Safety
 * `text` must be a valid C string; `out` must be writable.
 */
enum QkStatus qk_instance_parse(const char *text, struct QkInstance **out);

/**
 * Releases an instance; null is ignored.
 *
 * # Safety
 * `inst` must come from this library and not be used afterwards.
 */
void qk_instance_free(struct QkInstance *inst);

/**
 * Number of items, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t qk_instance_len(const struct QkInstance *inst);

/**
 * Capacity, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
uint64_t qk_instance_capacity(const struct QkInstance *inst);

/**
 * Exact optimum and one optimal packing. The packing is written as a packed
 * value with item 0 in the most significant of the `n` low bits.
 *
 * # Safety
 * `inst` must be a live handle; out-pointers must be writable.
 */
enum QkStatus qk_solve_exact(const struct QkInstance *inst,
                             uint64_t *out_optimum,
                             uint64_t *out_packing);

/**
 * Lazy- and very-greedy profits.
 *
 * # Safety
 * `inst` must be a live handle; out-pointers must be writable.
 */
enum QkStatus qk_greedy(const struct QkInstance *inst, uint64_t *out_lazy, uint64_t *out_very);

/**
 * Number of feasible packings in the uniform tree superposition.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum QkStatus qk_qtg_feasible_count(const struct QkInstance *inst, size_t *out);

/**
 * Binds an engine to an instance. `copula_k <= 0` selects the default
 * logistic steepness; it is ignored by the QTG engine.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum QkStatus qk_problem_new(const struct QkInstance *inst,
                             int engine,
                             double copula_k,
                             struct QkProblem **out);

/**
 * Releases a problem; null is ignored.
 *
 * # Safety
 * `problem` must come from this library and not be used afterwards.
 */
void qk_problem_free(struct QkProblem *problem);

/**
 * Exact expectation `F(γ, β)` of a depth-`q` circuit.
 *
 * # Safety
 * `gammas` and `betas` must point to `q` values; `out` must be writable.
 */
enum QkStatus qk_problem_expectation(const struct QkProblem *problem,
                                     const double *gammas,
                                     const double *betas,
                                     size_t q,
                                     double *out);

/**
 * Layer-wise optimization to depth `q`. Writes the final angles interleaved
 * as `γ1, β1, ..., γq, βq` into `out_angles` (room for `2q` values) and the
 * final expectation into `out_value`.
 *
 * # Safety
 * `problem` must be a live handle; `out_angles` must have room for `2q`
 * values; `out_value` must be writable.
 */
enum QkStatus qk_problem_optimize(const struct QkProblem *problem,
                                  size_t q,
                                  size_t grid_points,
                                  size_t max_evals,
                                  double *out_angles,
                                  double *out_value);

/**
 * Total cycles of a depth-`q` copula circuit on `n` items.
 *
 * # Safety
 * `out` must be writable.
 */
enum QkStatus qk_copula_cycles(size_t n, size_t q, uint64_t *out);

/**
 * Total cycles and qubits of a depth-`q` QTG circuit under the default cost
 * model. `out_qubits` may be null.
 *
 * # Safety
 * `inst` must be a live handle; `out_cycles` must be writable.
 */
enum QkStatus qk_qtg_cycles(const struct QkInstance *inst,
                            size_t q,
                            uint64_t *out_cycles,
                            size_t *out_qubits);

/**
 * Copy of the calling thread's last error message, or null if none.
 * Release with [`qk_string_free`].
 */
char *qk_last_error_message(void);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void qk_string_free(char *s);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qk_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QTG_QAOA_H */
