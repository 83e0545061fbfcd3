/* C interface for the ladderq library. Generated by cbindgen; do not edit. */

#ifndef LADDERQ_H
#define LADDERQ_H

/* This file is generated from the Rust sources. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum lq_status {
  // Success.
  LQ_OK = 0,
  // A pointer argument was null.
  LQ_NULL_POINTER = 1,
  // An argument failed to parse or was out of range.
  LQ_INVALID_ARGUMENT = 2,
  // The computation itself reported an error.
  LQ_COMPUTE_ERROR = 3,
  // A panic was caught at the boundary; state is unspecified.
  LQ_PANIC = 4,
} lq_status;

// Opaque handle to a composite-channel state.
typedef struct lq_state lq_state;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread.
//
// The pointer stays valid until the next failing call on the same thread.
// Never free it.
const char *lq_last_error_message(void);

// Parse a state from its JSON document (the state-file schema).
//
// # Safety
// `json` must be a valid NUL-terminated string; `out` must be a valid
// pointer to receive the handle.
enum lq_status lq_state_from_json(const char *json, struct lq_state **out);

// Build the pure coupled state |j,m⟩ of the (s, l) channel. Ranks and
// labels are half-integer strings such as "1/2" or "2".
//
// # Safety
// All strings NUL-terminated; `out` valid.
enum lq_status lq_state_pure(const char *s,
                             const char *l,
                             const char *j,
                             const char *m,
                             struct lq_state **out);

// Build the maximally mixed state of the (s, l) channel.
//
// # Safety
// All strings NUL-terminated; `out` valid.
enum lq_status lq_state_uniform(const char *s, const char *l, struct lq_state **out);

// Serialize a state back to its JSON document.
//
// # Safety
// `state` must be a live handle from this library; `out` valid.
enum lq_status lq_state_to_json(const struct lq_state *state, char **out);

// Entropy summary of a state, as JSON.
//
// # Safety
// `state` live handle; `out` valid.
enum lq_status lq_entropy_report_json(const struct lq_state *state, char **out);

// Witness report of a qubit ⊗ qunit state, as JSON.
//
// # Safety
// `state` live handle; `out` valid.
enum lq_status lq_witness_report_json(const struct lq_state *state, char **out);

// Ladder operators for one dimension, as JSON.
//
// # Safety
// `out` valid.
enum lq_status lq_ladder_json(size_t dim, char **out);

// Coupled basis of ranks (s, l), as JSON.
//
// # Safety
// All strings NUL-terminated; `out` valid.
enum lq_status lq_couple_json(const char *s, const char *l, char **out);

// Simulate tomography of a state and reconstruct it, as a JSON report.
//
// `phased` = 0 uses the planar axis family, nonzero the phase-extended one;
// `paired` selects the subchannel plan; `shots` = 0 means exact statistics,
// otherwise `seed` drives reproducible sampling.
//
// # Safety
// `state` live handle; `out` valid.
enum lq_status lq_tomo_roundtrip_json(const struct lq_state *state,
                                      int32_t phased,
                                      int32_t paired,
                                      uint64_t shots,
                                      uint64_t seed,
                                      char **out);

// Run a built-in worked example; returns its JSON report (the CSV, when the
// example has one, is embedded in the report under "csv").
//
// # Safety
// `name` NUL-terminated; `out` valid.
enum lq_status lq_example_json(const char *name, char **out);

// Release a string returned by this library.
//
// # Safety
// `text` must have come from this library and not be freed twice.
void lq_string_free(char *text);

// Release a state handle.
//
// # Safety
// `state` must have come from this library and not be freed twice.
void lq_state_free(struct lq_state *state);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LADDERQ_H */
