#ifndef IRC_FFI_H
#define IRC_FFI_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Pair `C1` with the destination-4 term in the mixed bound (the default).
#define IRC_CSWAP_PATTERN 0

// Keep the pairing as printed.
#define IRC_CSWAP_VERBATIM 1

typedef enum IrcStatus {
  IRC_STATUS_OK = 0,
  IRC_STATUS_NULL_POINTER = 1,
  IRC_STATUS_INVALID_ARGUMENT = 2,
  // Malformed JSON or a value outside the model.
  IRC_STATUS_SCHEMA = 3,
  // A probability table that is not a pmf.
  IRC_STATUS_NUMERIC = 4,
  IRC_STATUS_OUT_OF_RANGE = 5,
  IRC_STATUS_PANIC = 6,
} IrcStatus;

// Gaussian channel gains, power and link rate.
typedef struct IrcGaussConfig IrcGaussConfig;

// A joint pmf over named discrete variables.
typedef struct IrcJoint IrcJoint;

// Rate inequalities together with their frontier polygon.
typedef struct IrcRegion IrcRegion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *irc_version(void);

// Copy of the last error message on this thread, or NULL when the last call
// succeeded. Release it with `irc_string_free`.
char *irc_last_error_message(void);

// # Safety
// `s` must come from this library and not have been freed.
void irc_string_free(char *s);

// `0.5 log2(1 + x)` in bits.
//
// # Safety
// `out_value` must be valid for writes.
enum IrcStatus irc_cfn(double x, double *out_value);

// # Safety
// `out_config` must be valid for writes.
enum IrcStatus irc_gauss_config_new(double g31,
                                    double g32,
                                    double g41,
                                    double g42,
                                    double g51,
                                    double g52,
                                    double power,
                                    double r0,
                                    struct IrcGaussConfig **out_config);

// The reference gains at the given power and link rate.
//
// # Safety
// `out_config` must be valid for writes.
enum IrcStatus irc_gauss_config_reference(double power,
                                          double r0,
                                          struct IrcGaussConfig **out_config);

// # Safety
// `config` must be NULL or come from `irc_gauss_config_new`.
void irc_gauss_config_free(struct IrcGaussConfig *config);

// All bounds of the Gaussian region at one parameter point.
//
// # Safety
// `config` must be live and `out_region` valid for writes.
enum IrcStatus irc_gauss_region(const struct IrcGaussConfig *config,
                                double alpha1,
                                double alpha2,
                                double sigma2,
                                int32_t c_swap,
                                struct IrcRegion **out_region);

// # Safety
// `config` must be live and `out_value` valid for writes.
enum IrcStatus irc_gauss_sum_rate(const struct IrcGaussConfig *config,
                                  double alpha1,
                                  double alpha2,
                                  double sigma2,
                                  int32_t c_swap,
                                  double *out_value);

// Grid search over the power splits and the compression noise values in
// `sigmas`. Any of the output pointers except `out_sum_rate` may be NULL.
//
// # Safety
// `sigmas` must point to `n_sigmas` doubles; outputs must be NULL or writable.
enum IrcStatus irc_gauss_optimize(const struct IrcGaussConfig *config,
                                  double alpha_step,
                                  const double *sigmas,
                                  uintptr_t n_sigmas,
                                  int32_t c_swap,
                                  double *out_sum_rate,
                                  double *out_alpha1,
                                  double *out_alpha2,
                                  double *out_sigma2);

// Best sum rate when both users treat all interference as noise.
//
// # Safety
// As for `irc_gauss_optimize`.
enum IrcStatus irc_gauss_baseline_ian(const struct IrcGaussConfig *config,
                                      const double *sigmas,
                                      uintptr_t n_sigmas,
                                      int32_t c_swap,
                                      double *out_value);

// Best sum rate when both users decode all interference.
//
// # Safety
// As for `irc_gauss_optimize`.
enum IrcStatus irc_gauss_baseline_snd(const struct IrcGaussConfig *config,
                                      const double *sigmas,
                                      uintptr_t n_sigmas,
                                      int32_t c_swap,
                                      double *out_value);

// Achievable region of a discrete memoryless channel, from the same JSON
// documents the command line reads.
//
// # Safety
// Both strings must be NUL-terminated; `out_region` valid for writes.
enum IrcStatus irc_dm_eval_json(const char *channel_json,
                                const char *input_json,
                                struct IrcRegion **out_region);

// Capacity region of an injective deterministic channel. `input_json` may be
// NULL for uniform independent inputs.
//
// # Safety
// Strings must be NULL or NUL-terminated; `out_region` valid for writes.
enum IrcStatus irc_det_eval_json(const char *spec_json,
                                 const char *input_json,
                                 struct IrcRegion **out_region);

// Number of inequalities, or 0 for NULL.
//
// # Safety
// `region` must be NULL or live.
uintptr_t irc_region_len(const struct IrcRegion *region);

// Inequality `a R1 + b R2 <= rhs` at `index`, in evaluation order.
//
// # Safety
// `region` must be live; outputs valid for writes.
enum IrcStatus irc_region_get(const struct IrcRegion *region,
                              uintptr_t index,
                              uint8_t *out_a,
                              uint8_t *out_b,
                              double *out_rhs);

// Number of frontier vertices, or 0 for NULL or an empty region.
//
// # Safety
// `region` must be NULL or live.
uintptr_t irc_region_vertex_count(const struct IrcRegion *region);

// # Safety
// `region` must be live; outputs valid for writes.
enum IrcStatus irc_region_vertex(const struct IrcRegion *region,
                                 uintptr_t index,
                                 double *out_r1,
                                 double *out_r2);

// Maximum of `w1 R1 + w2 R2` over the region and a maximizing point.
// `out_r1` and `out_r2` may be NULL.
//
// # Safety
// `region` must be live; outputs NULL or writable.
enum IrcStatus irc_region_max_weighted(const struct IrcRegion *region,
                                       double w1,
                                       double w2,
                                       double *out_value,
                                       double *out_r1,
                                       double *out_r2);

// # Safety
// `region` must be NULL or come from this library.
void irc_region_free(struct IrcRegion *region);

// Joint pmf over `n_vars` variables with the given names and alphabet
// sizes; `table` is row-major with the first variable outermost.
//
// # Safety
// `names` and `sizes` point to `n_vars` entries, `table` to `table_len`
// doubles, `out_joint` is writable.
enum IrcStatus irc_joint_new(const char *const *names_ptr,
                             const uintptr_t *sizes,
                             uintptr_t n_vars,
                             const double *table,
                             uintptr_t table_len,
                             struct IrcJoint **out_joint);

// `I(A; B | C)` in bits. `C` may be empty.
//
// # Safety
// Each name array points to the stated number of NUL-terminated strings.
enum IrcStatus irc_joint_mutual_info(const struct IrcJoint *joint,
                                     const char *const *a,
                                     uintptr_t n_a,
                                     const char *const *b,
                                     uintptr_t n_b,
                                     const char *const *c,
                                     uintptr_t n_c,
                                     double *out_value);

// # Safety
// `joint` must be NULL or come from `irc_joint_new`.
void irc_joint_free(struct IrcJoint *joint);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IRC_FFI_H */
