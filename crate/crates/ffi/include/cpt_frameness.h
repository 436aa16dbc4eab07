#ifndef CPT_FRAMENESS_H
#define CPT_FRAMENESS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CptfStatus {
  CPTF_STATUS_OK = 0,
  CPTF_STATUS_NULL_POINTER = 1,
  CPTF_STATUS_USAGE = 2,
  CPTF_STATUS_DIMENSION_MISMATCH = 3,
  CPTF_STATUS_PHASE_NOT_STRIPPED = 4,
  CPTF_STATUS_SIZE_CAP = 5,
  CPTF_STATUS_CONTRACT = 6,
  CPTF_STATUS_NUMERICAL = 7,
  CPTF_STATUS_INVALID_DATA = 8,
  CPTF_STATUS_BUFFER_TOO_SMALL = 9,
  CPTF_STATUS_PANIC = 10,
} CptfStatus;

typedef enum CptfTransformation {
  CPTF_TRANSFORMATION_IDENTITY = 0,
  CPTF_TRANSFORMATION_C = 1,
  CPTF_TRANSFORMATION_PT = 2,
  CPTF_TRANSFORMATION_CPT = 3,
} CptfTransformation;

typedef enum CptfEncoding {
  CPTF_ENCODING_DFS = 0,
  CPTF_ENCODING_NAIVE = 1,
} CptfEncoding;

typedef enum CptfChannelMode {
  CPTF_CHANNEL_MODE_RANDOM_UNIFORM = 0,
  CPTF_CHANNEL_MODE_FIXED_IDENTITY = 1,
  CPTF_CHANNEL_MODE_FIXED_CPT = 2,
} CptfChannelMode;

/**
 * A built representation `{1, C, PT, CPT}` with its CPT sector projectors
 * (when the CPT phase is stripped).
 */
typedef struct CptfRep CptfRep;

typedef struct CptfProtocolSummary {
  uint64_t trials;
  double mean_fidelity;
  double std_error;
  double min_fidelity;
  /**
   * NaN when no tokens were used.
   */
  double guess_accuracy;
} CptfProtocolSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cptf_last_error(void);

/**
 * Builds the representation for spin `spin_times_two / 2`, internal number
 * `u_num / u_den` and momentum magnitude `p_mag`. `photon` keeps only the
 * transverse helicities of a massless spin-1 field.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum CptfStatus cptf_rep_new(uint32_t spin_times_two,
                             int64_t u_num,
                             int64_t u_den,
                             double p_mag,
                             bool massive,
                             bool photon,
                             double theta_c,
                             double theta_pt,
                             struct CptfRep **out);

/**
 * Releases a handle from [`cptf_rep_new`]; null is ignored.
 *
 * # Safety
 * `rep` must be null or a live handle, not used afterwards.
 */
void cptf_rep_free(struct CptfRep *rep);

/**
 * Sub-basis dimension, or 0 for a null handle.
 *
 * # Safety
 * `rep` must be null or a live handle.
 */
size_t cptf_rep_dim(const struct CptfRep *rep);

/**
 * Copies the operator of `g` into `out` (`2·dim·dim` doubles).
 *
 * # Safety
 * `rep` must be a live handle and `out` must point to `len` writable doubles.
 */
enum CptfStatus cptf_rep_operator(const struct CptfRep *rep,
                                  enum CptfTransformation g,
                                  double *out,
                                  size_t len);

/**
 * Dimensions of the CPT `+` and `−` sectors.
 *
 * # Safety
 * `rep` must be a live handle; `plus` and `minus` writable.
 */
enum CptfStatus cptf_rep_sector_dims(const struct CptfRep *rep, size_t *plus, size_t *minus);

/**
 * Sector weights of a normalized state of dimension `dim`.
 *
 * # Safety
 * `rep` must be a live handle, `state` must hold `2·dim` doubles, `q0`
 * and `q1` must be writable.
 */
enum CptfStatus cptf_standard_form(const struct CptfRep *rep,
                                   const double *state,
                                   size_t dim,
                                   double *q0,
                                   double *q1);

/**
 * Alignment rate in bits for sector weight `q0`; `+∞` when `q0 = ½`.
 *
 * # Safety
 * `bits` must be writable.
 */
enum CptfStatus cptf_alignment_rate(double q0, double *bits);

/**
 * Optimal probability of telling `ψ⊗ⁿ` from `(CPT ψ)⊗ⁿ`.
 *
 * # Safety
 * `rep` must be a live handle, `state` must hold `2·dim` doubles and
 * `out` must be writable.
 */
enum CptfStatus cptf_helstrom_success(const struct CptfRep *rep,
                                      const double *state,
                                      size_t dim,
                                      size_t copies,
                                      double *out);

/**
 * Seeded spin-0 (`u = 1`, `|p| = 1`) protocol run. Pass NaN as `token_q0`
 * for decoding without tokens.
 *
 * # Safety
 * `out` must be writable.
 */
enum CptfStatus cptf_protocol_run(enum CptfEncoding encoding,
                                  enum CptfChannelMode mode,
                                  uint64_t trials,
                                  uint64_t seed,
                                  double token_q0,
                                  size_t n_tokens,
                                  struct CptfProtocolSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CPT_FRAMENESS_H */
