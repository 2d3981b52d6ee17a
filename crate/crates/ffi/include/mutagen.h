#ifndef MUTAGEN_H
#define MUTAGEN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define MG_OP_AOR 1

#define MG_OP_ROR 2

#define MG_OP_CRP 4

typedef enum MgStatus {
  MG_STATUS_OK = 0,
  MG_STATUS_NULL_ARGUMENT = 1,
  MG_STATUS_INVALID_UTF8 = 2,
  MG_STATUS_PARSE_ERROR = 3,
  MG_STATUS_ARITY_MISMATCH = 4,
  MG_STATUS_CONFIG_ERROR = 5,
  MG_STATUS_NO_MUTANTS = 6,
  MG_STATUS_DOMAIN_TOO_LARGE = 7,
  MG_STATUS_PANIC = 99,
} MgStatus;

typedef enum MgOutcomeKind {
  MG_OUTCOME_KIND_VALUE = 0,
  MG_OUTCOME_KIND_RUNTIME_ERROR = 1,
  MG_OUTCOME_KIND_FUEL_EXHAUSTED = 2,
} MgOutcomeKind;

typedef enum MgRuntimeError {
  MG_RUNTIME_ERROR_NONE = 0,
  MG_RUNTIME_ERROR_UNDEFINED_VARIABLE = 1,
  MG_RUNTIME_ERROR_DIVISION_BY_ZERO = 2,
  MG_RUNTIME_ERROR_OVERFLOW = 3,
  MG_RUNTIME_ERROR_NO_RETURN = 4,
} MgRuntimeError;

typedef enum MgScanMode {
  MG_SCAN_MODE_OFF = 0,
  MG_SCAN_MODE_AUTO = 1,
  MG_SCAN_MODE_ON = 2,
} MgScanMode;

/**
 * A program together with its generated mutants.
 */
typedef struct MgMutantSet MgMutantSet;

/**
 * Parsed program.
 */
typedef struct MgProgram MgProgram;

typedef struct MgOutcome {
  enum MgOutcomeKind kind;
  /**
   * Meaningful when `kind` is `Value`.
   */
  int64_t value;
  /**
   * Meaningful when `kind` is `RuntimeError`.
   */
  enum MgRuntimeError error;
} MgOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread; empty after a
 * successful call. Valid until the next call into the library.
 */
const char *mg_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void mg_string_free(char *s);

/**
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MgStatus mg_program_parse(const char *source, struct MgProgram **out);

/**
 * # Safety
 * `program` must be null or a handle from [`mg_program_parse`] not yet freed.
 */
void mg_program_free(struct MgProgram *program);

/**
 * Number of parameters; 0 for a null handle.
 *
 * # Safety
 * `program` must be null or a live handle.
 */
size_t mg_program_arity(const struct MgProgram *program);

/**
 * Canonical source text of the program.
 *
 * # Safety
 * `program` must be a live handle and `out` a valid pointer.
 */
enum MgStatus mg_program_pretty(const struct MgProgram *program, char **out);

/**
 * # Safety
 * `program` must be a live handle, `inputs` must point to `len` values and
 * `out` must be valid.
 */
enum MgStatus mg_program_execute(const struct MgProgram *program,
                                 const int64_t *inputs,
                                 size_t len,
                                 uint64_t fuel,
                                 struct MgOutcome *out);

/**
 * Generates the mutants of `program` for the operators in `operator_mask`
 * (a combination of `MG_OP_*`). An empty result is not an error.
 *
 * # Safety
 * `program` must be a live handle and `out` a valid pointer.
 */
enum MgStatus mg_mutants_generate(const struct MgProgram *program,
                                  uint32_t operator_mask,
                                  struct MgMutantSet **out);

/**
 * # Safety
 * `set` must be null or a live handle from [`mg_mutants_generate`].
 */
void mg_mutants_free(struct MgMutantSet *set);

/**
 * # Safety
 * `set` must be null or a live handle.
 */
size_t mg_mutants_count(const struct MgMutantSet *set);

/**
 * JSON array of `{id, operator, line, column, original, mutated}`.
 *
 * # Safety
 * `set` must be a live handle and `out` a valid pointer.
 */
enum MgStatus mg_mutants_json(const struct MgMutantSet *set, char **out);

/**
 * Fills `cells` (row-major, `n_tests * mg_mutants_count(set)` bytes) with
 * 1 where a test kills a mutant and 0 otherwise. `tests` holds `n_tests`
 * rows of `arity` inputs each.
 *
 * # Safety
 * All pointers must be valid for the sizes described above.
 */
enum MgStatus mg_kill_matrix(const struct MgMutantSet *set,
                             const int64_t *tests,
                             size_t n_tests,
                             size_t arity,
                             uint64_t fuel,
                             uint8_t *cells);

/**
 * Runs the optimizer and returns the JSON run report in `report_json`.
 *
 * `config` is null (defaults) or a JSON object / `key = value` text of
 * evolution settings. `lo`/`hi` hold either one interval applied to every
 * parameter or one per parameter. `scan` is an [`MgScanMode`] value.
 * `target_reached`, when not null, receives 1 when the
 * suite reached the target score or the achievable maximum.
 *
 * # Safety
 * All pointers must be valid; `lo` and `hi` must hold `n_intervals` values.
 */
enum MgStatus mg_optimize(const struct MgProgram *program,
                          const char *config,
                          uint32_t operator_mask,
                          const int64_t *lo,
                          const int64_t *hi,
                          size_t n_intervals,
                          uint32_t scan,
                          int32_t *target_reached,
                          char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MUTAGEN_H */
