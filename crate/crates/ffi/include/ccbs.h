/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef CCBS_H
#define CCBS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CcbsStatus {
  CCBS_STATUS_OK = 0,
  CCBS_STATUS_NULL_POINTER = 1,
  CCBS_STATUS_INVALID_ARGUMENT = 2,
  CCBS_STATUS_PARSE_ERROR = 3,
  CCBS_STATUS_IO_ERROR = 4,
  CCBS_STATUS_PANIC = 5,
} CcbsStatus;

typedef enum CcbsOutcome {
  CCBS_OUTCOME_SOLVED = 0,
  CCBS_OUTCOME_TIMEOUT = 1,
  CCBS_OUTCOME_INFEASIBLE = 2,
} CcbsOutcome;

typedef struct CcbsInstance CcbsInstance;

typedef struct CcbsSolution CcbsSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread. The pointer stays valid
// until the next failing call on the same thread.
const char *ccbs_last_error(void);

// Builds an instance from the text of a MovingAI map plus scenario, or of
// a roadmap plus `start goal` task list. `agents == 0` takes every pair.
// `k` is the grid neighbourhood exponent (ignored for roadmaps).
//
// # Safety
// `map` and `tasks` must be NUL-terminated strings; `out` must be writable.
enum CcbsStatus ccbs_instance_from_text(const char *map,
                                        const char *tasks,
                                        size_t agents,
                                        uint32_t k,
                                        double radius,
                                        struct CcbsInstance **out);

// # Safety
// `instance` must be null or a live handle.
size_t ccbs_instance_num_agents(const struct CcbsInstance *instance);

// # Safety
// `instance` must be null or a handle not yet freed.
void ccbs_instance_free(struct CcbsInstance *instance);

// Runs one solver variant (`"vanilla"`, `"pc"`, `"ds"`, `"ds+pc"` or
// `"ds+pc+h"`) with a time limit in seconds.
//
// # Safety
// `instance` must be a live handle, `variant` a NUL-terminated string and
// `out` writable.
enum CcbsStatus ccbs_solve(const struct CcbsInstance *instance,
                           const char *variant,
                           double time_limit,
                           struct CcbsSolution **out);

// # Safety
// `solution` must be a live handle.
enum CcbsOutcome ccbs_solution_outcome(const struct CcbsSolution *solution);

// Sum of costs; infinity unless solved.
//
// # Safety
// `solution` must be null or a live handle.
double ccbs_solution_soc(const struct CcbsSolution *solution);

// # Safety
// `solution` must be null or a live handle.
size_t ccbs_solution_expanded(const struct CcbsSolution *solution);

// Search time in seconds, excluding heuristic precomputation.
//
// # Safety
// `solution` must be null or a live handle.
double ccbs_solution_runtime(const struct CcbsSolution *solution);

// Joint plan in plan-file format; empty unless solved. Release the string
// with `ccbs_string_free`. Returns null if `solution` is null.
//
// # Safety
// `solution` must be null or a live handle.
char *ccbs_solution_plan_text(const struct CcbsSolution *solution);

// # Safety
// `solution` must be null or a handle not yet freed.
void ccbs_solution_free(struct CcbsSolution *solution);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void ccbs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CCBS_H */
