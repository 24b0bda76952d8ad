#ifndef WTAKIT_H
#define WTAKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WtakitStatus {
  WTAKIT_STATUS_OK = 0,
  WTAKIT_STATUS_NULL_ARGUMENT = 1,
  WTAKIT_STATUS_INVALID_UTF8 = 2,
  WTAKIT_STATUS_PARSE = 3,
  WTAKIT_STATUS_INPUT = 4,
  WTAKIT_STATUS_CAPABILITY = 5,
  WTAKIT_STATUS_PRECONDITION = 6,
  WTAKIT_STATUS_SHAPE = 7,
  WTAKIT_STATUS_BUDGET = 8,
  WTAKIT_STATUS_FAILED = 9,
  WTAKIT_STATUS_PANIC = 10,
} WtakitStatus;

// Opaque weighted tree automaton.
typedef struct WtakitWta WtakitWta;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next library call on the same thread.
const char *wtakit_last_error(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void wtakit_string_free(char *s);

// Parses an automaton from its text format.
//
// # Safety
// `source` must be a NUL-terminated string and `out_wta` a writable pointer.
enum WtakitStatus wtakit_wta_parse(const char *source, struct WtakitWta **out_wta);

// # Safety
// `m` must be null or a handle from this library, not yet freed.
void wtakit_wta_free(struct WtakitWta *m);

// Canonical text of `m`; free with [`wtakit_string_free`].
//
// # Safety
// `m` must be a live handle and `out_text` a writable pointer.
enum WtakitStatus wtakit_wta_print(const struct WtakitWta *m, char **out_text);

// Number of states, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t wtakit_wta_num_states(const struct WtakitWta *m);

// Weight of `tree` (written like `sigma(alpha, alpha)`), as text.
//
// # Safety
// `m` must be a live handle, `tree` a NUL-terminated string and
// `out_weight` a writable pointer.
enum WtakitStatus wtakit_wta_eval(const struct WtakitWta *m, const char *tree, char **out_weight);

// Disjoint sum; the result recognizes the pointwise sum of the series.
//
// # Safety
// `a`, `b` must be live handles and `out_wta` a writable pointer.
enum WtakitStatus wtakit_wta_sum(const struct WtakitWta *a,
                                 const struct WtakitWta *b,
                                 struct WtakitWta **out_wta);

// Product construction for the pointwise product of the series.
//
// # Safety
// `a`, `b` must be live handles and `out_wta` a writable pointer.
enum WtakitStatus wtakit_wta_hadamard(const struct WtakitWta *a,
                                      const struct WtakitWta *b,
                                      struct WtakitWta **out_wta);

// Removes states that are not both reachable and useful.
//
// # Safety
// `m` must be a live handle and `out_wta` a writable pointer.
enum WtakitStatus wtakit_wta_trim(const struct WtakitWta *m, struct WtakitWta **out_wta);

// Checks whether `matrix` (rows over the states of `m`, columns over those
// of `n`) is a simulation of `m` by `n`.
//
// # Safety
// `m`, `n` must be live handles, `matrix` a NUL-terminated string and
// `out_holds` a writable pointer.
enum WtakitStatus wtakit_check_simulation(const struct WtakitWta *m,
                                          const struct WtakitWta *n,
                                          const char *matrix,
                                          bool *out_holds);

// Decides whether `a` and `b` recognize the same series. When they do not
// and a distinguishing tree was found, `*out_witness` receives it
// (free with [`wtakit_string_free`]); otherwise it is set to null.
// `out_witness` itself may be null.
//
// # Safety
// `a`, `b` must be live handles, `out_equivalent` a writable pointer and
// `out_witness` null or writable.
enum WtakitStatus wtakit_equiv(const struct WtakitWta *a,
                               const struct WtakitWta *b,
                               bool *out_equivalent,
                               char **out_witness);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WTAKIT_H */
