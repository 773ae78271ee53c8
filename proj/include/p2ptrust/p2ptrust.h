/*
 * p2ptrust C API.
 *
 * Every function returns a p2pt_status. On failure a description of the most
 * recent error on the calling thread is available from p2pt_last_error().
 * Handles are opaque; each *_create / *_load function pairs with a
 * *_destroy function. Destroy functions accept NULL.
 */
#ifndef P2PTRUST_H
#define P2PTRUST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(P2PT_BUILDING_LIBRARY)
#    define P2PT_API __declspec(dllexport)
#  else
#    define P2PT_API __declspec(dllimport)
#  endif
#else
#  define P2PT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum p2pt_status {
  P2PT_OK = 0,
  P2PT_ERR_NULL_ARGUMENT = 1,
  P2PT_ERR_DOMAIN = 2,
  P2PT_ERR_INVARIANT = 3,
  P2PT_ERR_NO_SAMPLES = 4,
  P2PT_ERR_CONFIG = 5,
  P2PT_ERR_IO = 6,
  P2PT_ERR_OUT_OF_RANGE = 7,
  P2PT_ERR_INTERNAL = 8
} p2pt_status;

P2PT_API const char* p2pt_status_string(p2pt_status status);
P2PT_API const char* p2pt_last_error(void);
P2PT_API const char* p2pt_version(void);

/* ---- trust measurement ---------------------------------------------------- */

P2PT_API p2pt_status p2pt_measure_ratio(double requested, double received, double* out);
P2PT_API p2pt_status p2pt_trust_refused_offer(double delta, double download_capacity,
                                              double total_requests_made, double* out);
P2PT_API p2pt_status p2pt_trust_accepted_offer(double actual, double feasible, double willing,
                                               double requested, double* out);

/* ---- TCP feasible rate ---------------------------------------------------- */

typedef struct p2pt_tcp_params {
  double w_max; /* packets */
  double rtt;   /* seconds */
  double t0;    /* seconds */
  int b;        /* packets per ACK */
  double p;     /* loss probability in [0, 1] */
} p2pt_tcp_params;

/* Packets per second. */
P2PT_API p2pt_status p2pt_feasible_rate(const p2pt_tcp_params* params, double* out);

/* ---- estimator ------------------------------------------------------------ */

typedef struct p2pt_estimator p2pt_estimator;

typedef enum p2pt_mean_kind { P2PT_MEAN_EXPONENTIAL = 0, P2PT_MEAN_ARITHMETIC = 1 } p2pt_mean_kind;

typedef struct p2pt_noise_model {
  double c1;
  double c2;
  double c;
  double sigma;
} p2pt_noise_model;

typedef struct p2pt_trust_estimate {
  double value;
  double raw_mean;
  double correction;
} p2pt_trust_estimate;

P2PT_API p2pt_status p2pt_estimator_create(double alpha, size_t window, p2pt_estimator** out);
P2PT_API p2pt_status p2pt_estimator_clone(const p2pt_estimator* est, p2pt_estimator** out);
P2PT_API void p2pt_estimator_destroy(p2pt_estimator* est);
P2PT_API p2pt_status p2pt_estimator_update(p2pt_estimator* est, double sample);
P2PT_API p2pt_status p2pt_estimator_count(const p2pt_estimator* est, uint64_t* out);
P2PT_API p2pt_status p2pt_estimator_ema(const p2pt_estimator* est, double* out);
P2PT_API p2pt_status p2pt_estimator_blue(const p2pt_estimator* est, const p2pt_noise_model* noise,
                                         p2pt_mean_kind mean, p2pt_trust_estimate* out);
P2PT_API p2pt_status p2pt_estimator_baseline(const p2pt_estimator* est, double* out);

P2PT_API p2pt_status p2pt_noise_model_compute(double c1, double c2, double sigma,
                                              p2pt_noise_model* out);
P2PT_API p2pt_status p2pt_estimate_c1(double requests_made, double download_capacity, double* out);
P2PT_API p2pt_status p2pt_estimate_c2_global(double total_shared_capacity, double total_requests,
                                             double* out);
/* shared[i], requests[i] describe neighbour i. */
P2PT_API p2pt_status p2pt_estimate_c2_neighborhood(const double* shared, const double* requests,
                                                   size_t count, double* out);

/* ---- metrics --------------------------------------------------------------- */

typedef struct p2pt_iteration_metrics {
  size_t iteration;
  double delta_r_raw;
  double delta_r_norm;
  double utilization;
} p2pt_iteration_metrics;

P2PT_API p2pt_status p2pt_utilization(const double* delivered, size_t count,
                                      double total_shared_capacity, double* out);

/* ---- experiments ---------------------------------------------------------- */

typedef struct p2pt_experiment p2pt_experiment;
typedef struct p2pt_report p2pt_report;

/* Library defaults. */
P2PT_API p2pt_status p2pt_experiment_create(p2pt_experiment** out);
/* "paper-homogeneous" or "paper-heterogeneous". */
P2PT_API p2pt_status p2pt_experiment_create_preset(const char* name, p2pt_experiment** out);
P2PT_API void p2pt_experiment_destroy(p2pt_experiment* exp);
/* Overlay keys from a JSON config file / string onto the experiment. */
P2PT_API p2pt_status p2pt_experiment_load_file(p2pt_experiment* exp, const char* path);
P2PT_API p2pt_status p2pt_experiment_load_string(p2pt_experiment* exp, const char* json);
P2PT_API p2pt_status p2pt_experiment_set_seeds(p2pt_experiment* exp, const uint64_t* seeds,
                                               size_t count);
P2PT_API p2pt_status p2pt_experiment_set_output_dir(p2pt_experiment* exp, const char* path);
P2PT_API p2pt_status p2pt_experiment_set_jobs(p2pt_experiment* exp, unsigned jobs);
/* Number of simulation runs the sweep expands to. */
P2PT_API p2pt_status p2pt_experiment_run_count(const p2pt_experiment* exp, size_t* out);
/* Canonical JSON of the base configuration. Valid until the next call on
 * this handle. */
P2PT_API p2pt_status p2pt_experiment_describe(p2pt_experiment* exp, const char** out);
/* Writes one CSV per run and manifest.json. files_written may be NULL. */
P2PT_API p2pt_status p2pt_experiment_run(const p2pt_experiment* exp, size_t* files_written);

/* Single simulation of the base configuration with the given seed. */
P2PT_API p2pt_status p2pt_simulate(const p2pt_experiment* exp, uint64_t seed, p2pt_report** out);
P2PT_API void p2pt_report_destroy(p2pt_report* report);
P2PT_API p2pt_status p2pt_report_iterations(const p2pt_report* report, size_t* out);
P2PT_API p2pt_status p2pt_report_metrics(const p2pt_report* report, size_t index,
                                         p2pt_iteration_metrics* out);
/* Mean of delta_r_norm over iterations first..last inclusive (1-based). */
P2PT_API p2pt_status p2pt_report_mean_delta_r(const p2pt_report* report, size_t first, size_t last,
                                              double* out);
P2PT_API p2pt_status p2pt_report_write_csv(const p2pt_report* report, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* P2PTRUST_H */
