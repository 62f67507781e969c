/* C interface to the rbig Gaussianization and information-theoretic estimators. */

#ifndef RBIG_CAPI_H
#define RBIG_CAPI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Rotation used between marginal Gaussianization passes.
typedef enum RbigRotation {
  RBIG_ROTATION_PCA = 0,
  RBIG_ROTATION_RANDOM_ORTHOGONAL = 1,
} RbigRotation;

// Univariate entropy estimator used inside the fit loop.
typedef enum RbigEntropyEstimator {
  RBIG_ENTROPY_ESTIMATOR_HISTOGRAM_MILLER_MADOW = 0,
  RBIG_ENTROPY_ESTIMATOR_SPACING = 1,
} RbigEntropyEstimator;

// Status code returned by every fallible function.
typedef enum RbigStatus {
  RBIG_STATUS_OK = 0,
  // A mathematical-domain precondition was violated.
  RBIG_STATUS_DOMAIN = 1,
  // Input data is malformed (shape, finiteness, row counts).
  RBIG_STATUS_DATA = 2,
  // Invalid fit configuration.
  RBIG_STATUS_CONFIG = 3,
  // A marginal is degenerate (constant column, too few samples).
  RBIG_STATUS_DEGENERATE_MARGINAL = 4,
  // A numerical operation failed to converge or produced non-finite values.
  RBIG_STATUS_NUMERIC = 5,
  // Synthetic-data generation failed.
  RBIG_STATUS_GENERATION = 6,
  // Text input could not be parsed.
  RBIG_STATUS_PARSE = 7,
  // A model document failed validation.
  RBIG_STATUS_MODEL_VALIDATION = 8,
  // The call itself was malformed (bad argument combination).
  RBIG_STATUS_USAGE = 9,
  // An I/O operation failed.
  RBIG_STATUS_IO = 10,
  // JSON serialization or deserialization failed.
  RBIG_STATUS_JSON = 11,
  // A required pointer argument was null.
  RBIG_STATUS_NULL_POINTER = 12,
  // A string argument was not valid UTF-8.
  RBIG_STATUS_UTF8 = 13,
  // An internal invariant failed; the library state is still consistent.
  RBIG_STATUS_PANIC = 14,
} RbigStatus;

// Opaque fitted-model handle.
typedef struct RbigModelHandle RbigModelHandle;

// Fit options. Obtain defaults from [`rbig_fit_options_default`] and
// override fields as needed.
typedef struct RbigFitOptions {
  enum RbigRotation rotation;
  enum RbigEntropyEstimator entropy_estimator;
  size_t max_layers;
  size_t patience;
  double noise_floor_multiplier;
  uint64_t rng_seed;
} RbigFitOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string; never freed.
const char *rbig_version(void);

// Message describing the most recent failure on the calling thread. The
// pointer stays valid until the next failing call on the same thread.
const char *rbig_last_error_message(void);

// Default fit options (PCA rotations, histogram entropies, 100-layer cap).
struct RbigFitOptions rbig_fit_options_default(void);

// Fits a Gaussianization model.
//
// # Safety
// `data` must point to `n_samples * dims` doubles (row-major); `options`
// must be null (defaults) or point to a valid options struct; `out_model`
// must be a valid pointer. On success `*out_model` owns the model and must
// be released with [`rbig_model_free`].
enum RbigStatus rbig_fit(const double *data,
                         size_t n_samples,
                         size_t dims,
                         const struct RbigFitOptions *options,
                         struct RbigModelHandle **out_model);

// Releases a model handle. Null is a no-op.
//
// # Safety
// `model` must be null or a pointer previously returned through an
// out-parameter of this library, not yet freed.
void rbig_model_free(struct RbigModelHandle *model);

// Number of input dimensions the model was fitted on; 0 if `model` is null.
//
// # Safety
// `model` must be null or a live model handle.
size_t rbig_model_dims(const struct RbigModelHandle *model);

// Number of fitted layers; 0 if `model` is null.
//
// # Safety
// `model` must be null or a live model handle.
size_t rbig_model_n_layers(const struct RbigModelHandle *model);

// Total correlation captured by the model, in nats; NaN if `model` is null.
//
// # Safety
// `model` must be null or a live model handle.
double rbig_model_total_correlation(const struct RbigModelHandle *model);

// Calibrated per-layer noise floor, in nats; NaN if `model` is null.
//
// # Safety
// `model` must be null or a live model handle.
double rbig_model_noise_floor(const struct RbigModelHandle *model);

// Maps data through the fitted model into the Gaussianized space.
//
// # Safety
// `data` and `out` must each point to `n_samples * dims` doubles
// (row-major; they may not alias), with `dims` equal to the model's
// dimension; `model` must be a live model handle.
enum RbigStatus rbig_model_transform(const struct RbigModelHandle *model,
                                     const double *data,
                                     size_t n_samples,
                                     size_t dims,
                                     double *out);

// Maps Gaussianized points back to the data space.
//
// # Safety
// Same contract as [`rbig_model_transform`].
enum RbigStatus rbig_model_inverse_transform(const struct RbigModelHandle *model,
                                             const double *data,
                                             size_t n_samples,
                                             size_t dims,
                                             double *out);

// Serializes the model to its versioned JSON document.
//
// # Safety
// `model` must be a live model handle and `out_json` a valid pointer. On
// success `*out_json` is a NUL-terminated string owned by the caller;
// release it with [`rbig_string_free`].
enum RbigStatus rbig_model_to_json(const struct RbigModelHandle *model, char **out_json);

// Parses and validates a model document.
//
// # Safety
// `json` must be a NUL-terminated string and `out_model` a valid pointer.
// On success `*out_model` owns the model; release with [`rbig_model_free`].
enum RbigStatus rbig_model_from_json(const char *json, struct RbigModelHandle **out_model);

// Releases a string returned through an out-parameter. Null is a no-op.
//
// # Safety
// `s` must be null or a string previously returned by this library, not
// yet freed.
void rbig_string_free(char *s);

// Estimates the total correlation (multi-information) of the sample, in
// nats.
//
// # Safety
// `data` must point to `n_samples * dims` doubles (row-major); `options`
// may be null for defaults; `out_value` must be a valid pointer.
enum RbigStatus rbig_estimate_total_correlation(const double *data,
                                                size_t n_samples,
                                                size_t dims,
                                                const struct RbigFitOptions *options,
                                                double *out_value);

// Estimates the joint differential entropy of the sample, in nats.
//
// # Safety
// Same contract as [`rbig_estimate_total_correlation`].
enum RbigStatus rbig_estimate_entropy(const double *data,
                                      size_t n_samples,
                                      size_t dims,
                                      const struct RbigFitOptions *options,
                                      double *out_value);

// Estimates the KL divergence of the distribution behind `x` from the
// distribution behind `y` (x is the numerator), in nats. The two samples
// must share the same dimension; row counts may differ.
//
// # Safety
// `x` must point to `x_samples * dims` doubles and `y` to
// `y_samples * dims` doubles (row-major); `options` may be null;
// `out_value` must be a valid pointer.
enum RbigStatus rbig_estimate_kl(const double *x,
                                 size_t x_samples,
                                 const double *y,
                                 size_t y_samples,
                                 size_t dims,
                                 const struct RbigFitOptions *options,
                                 double *out_value);

// Estimates the mutual information between two jointly sampled variables,
// in nats. Rows must correspond: `x` and `y` need the same sample count.
//
// # Safety
// `x` must point to `n_samples * x_dims` doubles and `y` to
// `n_samples * y_dims` doubles (row-major); `options` may be null;
// `out_value` must be a valid pointer.
enum RbigStatus rbig_estimate_mutual_information(const double *x,
                                                 size_t x_dims,
                                                 const double *y,
                                                 size_t y_dims,
                                                 size_t n_samples,
                                                 const struct RbigFitOptions *options,
                                                 double *out_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RBIG_CAPI_H */
