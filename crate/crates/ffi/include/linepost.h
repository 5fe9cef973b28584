#ifndef LINEPOST_H
#define LINEPOST_H

/* Generated by cbindgen from the linepost-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every ABI call.  Zero is success; everything else leaves a
// message in [`lp_last_error`].
typedef enum LpStatus {
  LP_STATUS_OK = 0,
  // A required pointer argument was NULL.
  LP_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  LP_STATUS_INVALID_UTF8 = 2,
  // The scheme JSON did not describe a scheme, or the claim is hopeless
  // (negative surplus).
  LP_STATUS_BAD_SCHEME = 3,
  // The oracle ran out of attempts without certifying the claim.
  LP_STATUS_INCONCLUSIVE = 4,
  // No reduction tree was found within the search bounds.
  LP_STATUS_SEARCH_FAILED = 5,
  // The certificate did not parse or failed its re-check.
  LP_STATUS_BAD_CERTIFICATE = 6,
  // The oracle could not run at all (bad modulus, sampling exhausted).
  LP_STATUS_ORACLE_FAILURE = 7,
  // An internal panic was caught at the boundary.
  LP_STATUS_PANIC = 8,
} LpStatus;

// Opaque certificate handle.
typedef struct LpCertificate LpCertificate;

// Outcome of a verification run.  `verified` is 1 or 0; on success
// `prime`/`seed` identify the successful attempt and `rank == cols`; on
// an inconclusive run `rank` is the best rank seen and `attempts` counts
// the tries consumed.
typedef struct LpVerdict {
  uint8_t verified;
  uint64_t prime;
  uint64_t seed;
  uint64_t rank;
  uint64_t cols;
  uint32_t attempts;
} LpVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the library, as a static NUL-terminated string.
const char *lp_version(void);

// Message describing the most recent failure on this thread.  The
// pointer stays valid until the next library call on the same thread.
const char *lp_last_error(void);

// Run the oracle on the scheme described by `scheme_json` and fill
// `out`.  Returns `LP_STATUS_OK` when the claim was certified.
//
// # Safety
// `scheme_json` must be a NUL-terminated string and `out` a valid
// pointer.
enum LpStatus lp_verify_empty_json(const char *scheme_json,
                                   uint64_t prime,
                                   uint64_t seed,
                                   uint32_t retries,
                                   struct LpVerdict *out);

// Search for a reduction certificate for the scheme described by
// `scheme_json` and hand it back as an opaque handle in `out`.
//
// # Safety
// `scheme_json` must be a NUL-terminated string and `out` a valid
// pointer; the returned handle must be released with
// `lp_certificate_free`.
enum LpStatus lp_search_json(const char *scheme_json,
                             uint64_t prime,
                             uint64_t seed,
                             uint32_t retries,
                             struct LpCertificate **out);

// Parse a certificate from JSON into an opaque handle.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer; the
// returned handle must be released with `lp_certificate_free`.
enum LpStatus lp_certificate_from_json(const char *json, struct LpCertificate **out);

// Serialize a certificate to its canonical JSON; the string is owned by
// the caller and released with `lp_string_free`.
//
// # Safety
// `cert` must be a live handle and `out` a valid pointer.
enum LpStatus lp_certificate_to_json(const struct LpCertificate *cert, char **out);

// Re-check a certificate from scratch, replaying its oracle leaves.
//
// # Safety
// `cert` must be a live handle.
enum LpStatus lp_certificate_verify(const struct LpCertificate *cert);

// Number of nodes in the certificate; 0 for a NULL handle.
//
// # Safety
// `cert` must be NULL or a live handle.
uint64_t lp_certificate_node_count(const struct LpCertificate *cert);

// Release a certificate handle.  NULL is a no-op.
//
// # Safety
// `cert` must be NULL or a handle produced by this library, and must not
// be used afterwards.
void lp_certificate_free(struct LpCertificate *cert);

// Release a string produced by this library.  NULL is a no-op.
//
// # Safety
// `s` must be NULL or a string produced by this library, and must not be
// used afterwards.
void lp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINEPOST_H */
