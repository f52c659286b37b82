#ifndef HOMOTOMO_H
#define HOMOTOMO_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HtStatus {
  HT_STATUS_OK = 0,
  HT_STATUS_NULL_POINTER = 1,
  // Invalid argument or state parameters.
  HT_STATUS_DOMAIN = 2,
  // Evaluation outside the representable or accurate range.
  HT_STATUS_RANGE = 3,
  // A numerical accuracy gate failed.
  HT_STATUS_ACCURACY = 4,
  HT_STATUS_IO = 5,
  HT_STATUS_PARSE = 6,
  // Unexpected internal failure (caught panic).
  HT_STATUS_INTERNAL = 7,
} HtStatus;

typedef enum HtRepresentation {
  HT_REPRESENTATION_CANONICAL = 0,
  HT_REPRESENTATION_HERMITE_SERIES = 1,
  HT_REPRESENTATION_DERIV_PRODUCT = 2,
  HT_REPRESENTATION_DERIV_PRODUCT_SWAPPED = 3,
  HT_REPRESENTATION_SYMMETRIZED = 4,
} HtRepresentation;

// Opaque tomogram handle.
typedef struct HtTomogram HtTomogram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty if none. Valid until the next failing call.
const char *ht_last_error(void);

// Library version as a static NUL-terminated string.
const char *ht_version(void);

// Sample a squeezed coherent state (q̄, p̄, ζ). `n_phi` or `n_q` of 0 selects the default grid.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum HtStatus ht_tomogram_gaussian(double qbar,
                                   double pbar,
                                   double zeta_re,
                                   double zeta_im,
                                   double hbar,
                                   size_t n_phi,
                                   size_t n_q,
                                   struct HtTomogram **out);

// Read a tomogram from CSV or JSON.
//
// # Safety
// `path` must be NUL-terminated; `out` must be writable.
enum HtStatus ht_tomogram_read(const char *path, struct HtTomogram **out);

// Write `<path>` as CSV and its `.json` twin.
//
// # Safety
// `t` must come from this library; `path` must be NUL-terminated.
enum HtStatus ht_tomogram_write(const struct HtTomogram *t, const char *path);

// Release a handle; NULL is ignored.
//
// # Safety
// `t` must be NULL or a handle not yet freed.
void ht_tomogram_free(struct HtTomogram *t);

// # Safety
// Pointers must be valid.
enum HtStatus ht_tomogram_dims(const struct HtTomogram *t, size_t *n_phi, size_t *n_q);

// Interpolated marginal W̆(φ; q).
//
// # Safety
// Pointers must be valid.
enum HtStatus ht_tomogram_marginal(const struct HtTomogram *t, double phi, double q, double *out);

// ⟨m|ρ|n⟩ with the canonical pattern function and default quadrature.
//
// # Safety
// Pointers must be valid.
enum HtStatus ht_fock_element(const struct HtTomogram *t,
                              size_t m,
                              size_t n,
                              double *re,
                              double *im);

// ρ_{mn}, m, n ≤ nmax, written row-major as interleaved (re, im) pairs into `buf`,
// which must hold `2·(nmax+1)²` doubles (`len` is checked).
//
// # Safety
// `buf` must point to `len` writable doubles.
enum HtStatus ht_density(const struct HtTomogram *t, size_t nmax, double *buf, size_t len);

// Husimi Q(α).
//
// # Safety
// Pointers must be valid.
enum HtStatus ht_qfunction(const struct HtTomogram *t, double re, double im, double *out);

// ⟨a†ᵏaˡρ⟩ by angle averaging.
//
// # Safety
// Pointers must be valid.
enum HtStatus ht_moment(const struct HtTomogram *t, size_t k, size_t l, double *re, double *im);

// W(q, p) by filtered back-projection.
//
// # Safety
// Pointers must be valid.
enum HtStatus ht_wigner(const struct HtTomogram *t, double q, double p, double *out);

// Pattern function F_{m,n}(x) in the chosen representation.
//
// # Safety
// `out` must be writable.
enum HtStatus ht_pattern_value(enum HtRepresentation rep,
                               size_t m,
                               size_t n,
                               double x,
                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOMOTOMO_H */
