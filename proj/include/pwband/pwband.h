/* C interface for the Paley-Wiener confidence band library.
 *
 * All functions return a pwb_status; outputs come back through pointers.
 * On failure the out-pointer is untouched and pwb_last_error() describes
 * the problem for the calling thread. Strings and buffers returned by the
 * library are freed with pwb_free_string / pwb_free_buffer; handles with
 * their matching pwb_*_free.
 */
#ifndef PWBAND_H
#define PWBAND_H

#include <stdint.h>

#if defined(_WIN32)
#define PWB_API __declspec(dllexport)
#else
#define PWB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pwb_status {
  PWB_OK = 0,
  PWB_INVALID_ARGUMENT = 1,
  PWB_DUPLICATE_INPUTS = 2,
  PWB_ILL_CONDITIONED = 3,
  PWB_NOT_PSD = 4,
  PWB_INVALID_RISK = 5,
  PWB_EMPTY_OBSERVED_INTERVALS = 6,
  PWB_DEGENERATE_DESIGN = 7,
  PWB_NO_STRICTLY_FEASIBLE_POINT = 8,
  PWB_QUERY_COLLISION = 9,
  PWB_NON_MONOTONE_CDF = 10,
  PWB_INFEASIBLE = 11,
  PWB_IO_ERROR = 12,
  PWB_INTERNAL = 13
} pwb_status;

typedef enum pwb_noise_family {
  PWB_NOISE_NONE = 0,
  PWB_NOISE_LAPLACE = 1,
  PWB_NOISE_GAUSSIAN = 2,
  PWB_NOISE_UNIFORM = 3
} pwb_noise_family;

typedef struct pwb_band pwb_band;
typedef struct pwb_coverage_report pwb_coverage_report;
typedef struct pwb_demo pwb_demo;

/* Message for the most recent failure on this thread; never NULL. */
PWB_API const char* pwb_last_error(void);

PWB_API void pwb_free_string(char* s);
PWB_API void pwb_free_buffer(double* p);

/* ---- noise-free band (Table-I style interval at every grid point) ---- */

PWB_API pwb_status pwb_band_free_compute(const double* xs, const double* ys, int64_t n,
                                         const double* grid, int64_t grid_len, double eta,
                                         double alpha, double delta0, int clip_unit,
                                         pwb_band** out);

/* ---- noisy band (SPS ellipsoid + observed intervals + tau budget) ---- */

typedef struct pwb_noisy_options {
  double alpha;          /* default 0.05 */
  double beta;           /* default 0.05 */
  int64_t d;             /* 0: ceil(sqrt(n)) */
  double lambda;         /* default 0.1 */
  uint64_t seed;         /* sign-perturbation seed */
  int64_t m;             /* 0: derive from beta */
  int64_t q;             /* 0: derive from beta */
  double delta0;         /* tail-energy allowance */
  int clip_unit;         /* intersect with [-1, 1] */
  int64_t perturbed_rows; /* -1: first d rows; n: every noise row */
} pwb_noisy_options;

PWB_API void pwb_noisy_options_init(pwb_noisy_options* opts);

PWB_API pwb_status pwb_band_noisy_compute(const double* xs, const double* ys, int64_t n,
                                          const double* grid, int64_t grid_len, double eta,
                                          const pwb_noisy_options* opts, pwb_band** out);

/* ---- band accessors ---- */

PWB_API int64_t pwb_band_size(const pwb_band* band);
PWB_API pwb_status pwb_band_get(const pwb_band* band, int64_t i, double* x, double* lower,
                                double* upper, int* empty);
PWB_API double pwb_band_risk(const pwb_band* band);
PWB_API double pwb_band_bound_value(const pwb_band* band);
/* CSV rows x,lower,upper,empty; doubles as %.17g. */
PWB_API pwb_status pwb_band_to_csv(const pwb_band* band, char** out);
/* Meta JSON; timestamp NULL or empty omits the generated_at field. */
PWB_API pwb_status pwb_band_to_json(const pwb_band* band, const char* timestamp, char** out);
PWB_API void pwb_band_free(pwb_band* band);

/* ---- Monte Carlo coverage experiment ---- */

typedef struct pwb_coverage_options {
  int algorithm; /* 0: noise-free, 1: noisy */
  int64_t trials;
  int64_t n;
  int64_t grid_resolution;
  double eta;
  double alpha;
  double beta;
  int64_t d;
  double lambda;
  int64_t m;
  int64_t q;
  int64_t perturbed_rows;
  int noise_family; /* pwb_noise_family */
  double noise_scale;
  uint64_t seed;
  int threads; /* 0: all cores */
  int clip_unit;
} pwb_coverage_options;

PWB_API void pwb_coverage_options_init(pwb_coverage_options* opts);

PWB_API pwb_status pwb_coverage_run(const pwb_coverage_options* opts,
                                    pwb_coverage_report** out);

PWB_API int64_t pwb_coverage_trials(const pwb_coverage_report* report);
PWB_API int64_t pwb_coverage_successes(const pwb_coverage_report* report);
PWB_API int64_t pwb_coverage_errors(const pwb_coverage_report* report);
PWB_API double pwb_coverage_reliability(const pwb_coverage_report* report);
PWB_API double pwb_coverage_guarantee(const pwb_coverage_report* report);
PWB_API double pwb_coverage_mean_width(const pwb_coverage_report* report);
PWB_API pwb_status pwb_coverage_to_json(const pwb_coverage_report* report,
                                        const char* timestamp, char** out);
PWB_API void pwb_coverage_free(pwb_coverage_report* report);

/* ---- demo data generation (random true function + dataset) ---- */

PWB_API pwb_status pwb_demo_generate(uint64_t seed, int64_t n, double eta, int noise_family,
                                     double noise_scale, pwb_demo** out);
PWB_API int64_t pwb_demo_size(const pwb_demo* demo);
PWB_API const double* pwb_demo_xs(const pwb_demo* demo);
PWB_API const double* pwb_demo_ys(const pwb_demo* demo);
PWB_API double pwb_demo_true_eval(const pwb_demo* demo, double x);
PWB_API double pwb_demo_norm_sq(const pwb_demo* demo);
PWB_API double pwb_demo_tail_energy(const pwb_demo* demo);
PWB_API void pwb_demo_free(pwb_demo* demo);

/* ---- CSV input (header x,y) ---- */

PWB_API pwb_status pwb_read_xy_csv(const char* path, double** xs, double** ys, int64_t* n);

#ifdef __cplusplus
}
#endif

#endif /* PWBAND_H */
