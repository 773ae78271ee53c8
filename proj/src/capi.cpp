#include "p2ptrust/p2ptrust.h"

#include <exception>
#include <new>
#include <string>
#include <vector>

#include "p2ptrust/errors.hpp"
#include "p2ptrust/estimator.hpp"
#include "p2ptrust/experiment.hpp"
#include "p2ptrust/simulation.hpp"
#include "p2ptrust/tcp_model.hpp"
#include "p2ptrust/trust.hpp"

struct p2pt_estimator {
  p2ptrust::EstimatorState state;
};

struct p2pt_experiment {
  p2ptrust::ExperimentSpec spec;
  std::string description;
};

struct p2pt_report {
  p2ptrust::SimReport report;
};

namespace {

thread_local std::string last_error;

p2pt_status fail(p2pt_status status, const char* what) {
  last_error = what;
  return status;
}

// Maps exceptions thrown by the core onto status codes.
template <class F>
p2pt_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return P2PT_OK;
  } catch (const p2ptrust::DomainError& e) {
    return fail(P2PT_ERR_DOMAIN, e.what());
  } catch (const p2ptrust::InvariantError& e) {
    return fail(P2PT_ERR_INVARIANT, e.what());
  } catch (const p2ptrust::NoSamplesError& e) {
    return fail(P2PT_ERR_NO_SAMPLES, e.what());
  } catch (const p2ptrust::ConfigError& e) {
    return fail(P2PT_ERR_CONFIG, e.what());
  } catch (const p2ptrust::IoError& e) {
    return fail(P2PT_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(P2PT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(P2PT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(P2PT_ERR_INTERNAL, "unknown error");
  }
}

#define P2PT_REQUIRE(ptr)                                           \
  do {                                                              \
    if ((ptr) == nullptr) return fail(P2PT_ERR_NULL_ARGUMENT, #ptr " is null"); \
  } while (0)

p2pt_noise_model to_c(const p2ptrust::NoiseModel& n) { return {n.c1, n.c2, n.c, n.sigma}; }
p2ptrust::NoiseModel from_c(const p2pt_noise_model& n) { return {n.c1, n.c2, n.c, n.sigma}; }

}  // namespace

extern "C" {

const char* p2pt_status_string(p2pt_status status) {
  switch (status) {
    case P2PT_OK: return "ok";
    case P2PT_ERR_NULL_ARGUMENT: return "null argument";
    case P2PT_ERR_DOMAIN: return "domain error";
    case P2PT_ERR_INVARIANT: return "invariant violation";
    case P2PT_ERR_NO_SAMPLES: return "no samples";
    case P2PT_ERR_CONFIG: return "invalid configuration";
    case P2PT_ERR_IO: return "i/o error";
    case P2PT_ERR_OUT_OF_RANGE: return "index out of range";
    case P2PT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* p2pt_last_error(void) { return last_error.c_str(); }

const char* p2pt_version(void) { return "0.1.0"; }

p2pt_status p2pt_measure_ratio(double requested, double received, double* out) {
  P2PT_REQUIRE(out);
  return guarded([&] { *out = p2ptrust::measure_ratio(requested, received); });
}

p2pt_status p2pt_trust_refused_offer(double delta, double download_capacity,
                                     double total_requests_made, double* out) {
  P2PT_REQUIRE(out);
  return guarded([&] {
    *out = p2ptrust::trust_refused_offer({delta, download_capacity, total_requests_made});
  });
}

p2pt_status p2pt_trust_accepted_offer(double actual, double feasible, double willing,
                                      double requested, double* out) {
  P2PT_REQUIRE(out);
  return guarded(
      [&] { *out = p2ptrust::trust_accepted_offer({actual, feasible, willing, requested}); });
}

p2pt_status p2pt_feasible_rate(const p2pt_tcp_params* params, double* out) {
  P2PT_REQUIRE(params);
  P2PT_REQUIRE(out);
  return guarded([&] {
    *out = p2ptrust::feasible_rate({params->w_max, params->rtt, params->t0, params->b, params->p});
  });
}

p2pt_status p2pt_estimator_create(double alpha, size_t window, p2pt_estimator** out) {
  P2PT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new p2pt_estimator{p2ptrust::EstimatorState(alpha, window)}; });
}

p2pt_status p2pt_estimator_clone(const p2pt_estimator* est, p2pt_estimator** out) {
  P2PT_REQUIRE(est);
  P2PT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new p2pt_estimator{est->state}; });
}

void p2pt_estimator_destroy(p2pt_estimator* est) { delete est; }

p2pt_status p2pt_estimator_update(p2pt_estimator* est, double sample) {
  P2PT_REQUIRE(est);
  return guarded([&] { est->state.push(sample); });
}

p2pt_status p2pt_estimator_count(const p2pt_estimator* est, uint64_t* out) {
  P2PT_REQUIRE(est);
  P2PT_REQUIRE(out);
  *out = est->state.sample_count();
  return P2PT_OK;
}

p2pt_status p2pt_estimator_ema(const p2pt_estimator* est, double* out) {
  P2PT_REQUIRE(est);
  P2PT_REQUIRE(out);
  if (est->state.sample_count() == 0) return fail(P2PT_ERR_NO_SAMPLES, "no samples");
  *out = est->state.ema_mean();
  return P2PT_OK;
}

p2pt_status p2pt_estimator_blue(const p2pt_estimator* est, const p2pt_noise_model* noise,
                                p2pt_mean_kind mean, p2pt_trust_estimate* out) {
  P2PT_REQUIRE(est);
  P2PT_REQUIRE(noise);
  P2PT_REQUIRE(out);
  return guarded([&] {
    const auto kind = mean == P2PT_MEAN_ARITHMETIC ? p2ptrust::MeanKind::arithmetic
                                                   : p2ptrust::MeanKind::exponential;
    const auto e = p2ptrust::blue_estimate(est->state, from_c(*noise), kind);
    *out = {e.value, e.raw_mean, e.correction};
  });
}

p2pt_status p2pt_estimator_baseline(const p2pt_estimator* est, double* out) {
  P2PT_REQUIRE(est);
  P2PT_REQUIRE(out);
  return guarded([&] { *out = p2ptrust::baseline_estimate(est->state); });
}

p2pt_status p2pt_noise_model_compute(double c1, double c2, double sigma, p2pt_noise_model* out) {
  P2PT_REQUIRE(out);
  return guarded([&] { *out = to_c(p2ptrust::compute_noise_model(c1, c2, sigma)); });
}

p2pt_status p2pt_estimate_c1(double requests_made, double download_capacity, double* out) {
  P2PT_REQUIRE(out);
  return guarded([&] { *out = p2ptrust::estimate_c1(requests_made, download_capacity); });
}

p2pt_status p2pt_estimate_c2_global(double total_shared_capacity, double total_requests,
                                    double* out) {
  P2PT_REQUIRE(out);
  return guarded(
      [&] { *out = p2ptrust::estimate_c2_global(total_shared_capacity, total_requests); });
}

p2pt_status p2pt_estimate_c2_neighborhood(const double* shared, const double* requests,
                                          size_t count, double* out) {
  P2PT_REQUIRE(out);
  if (count > 0) {
    P2PT_REQUIRE(shared);
    P2PT_REQUIRE(requests);
  }
  return guarded([&] {
    std::vector<p2ptrust::CapacityReport> reports(count);
    for (size_t i = 0; i < count; ++i) reports[i] = {shared[i], requests[i]};
    *out = p2ptrust::estimate_c2_neighborhood(reports);
  });
}

p2pt_status p2pt_utilization(const double* delivered, size_t count, double total_shared_capacity,
                             double* out) {
  P2PT_REQUIRE(out);
  if (count > 0) P2PT_REQUIRE(delivered);
  return guarded([&] {
    *out = p2ptrust::utilization(std::span<const double>(delivered, count), total_shared_capacity);
  });
}

p2pt_status p2pt_experiment_create(p2pt_experiment** out) {
  P2PT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new p2pt_experiment{}; });
}

p2pt_status p2pt_experiment_create_preset(const char* name, p2pt_experiment** out) {
  P2PT_REQUIRE(name);
  P2PT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new p2pt_experiment{p2ptrust::preset(name), {}}; });
}

void p2pt_experiment_destroy(p2pt_experiment* exp) { delete exp; }

p2pt_status p2pt_experiment_load_file(p2pt_experiment* exp, const char* path) {
  P2PT_REQUIRE(exp);
  P2PT_REQUIRE(path);
  return guarded([&] {
    p2ptrust::ExperimentSpec copy = exp->spec;
    p2ptrust::overlay_config_file(copy, path);
    exp->spec = std::move(copy);
  });
}

p2pt_status p2pt_experiment_load_string(p2pt_experiment* exp, const char* json) {
  P2PT_REQUIRE(exp);
  P2PT_REQUIRE(json);
  return guarded([&] {
    p2ptrust::ExperimentSpec copy = exp->spec;
    p2ptrust::overlay_config_text(copy, json);
    exp->spec = std::move(copy);
  });
}

p2pt_status p2pt_experiment_set_seeds(p2pt_experiment* exp, const uint64_t* seeds, size_t count) {
  P2PT_REQUIRE(exp);
  if (count == 0) return fail(P2PT_ERR_CONFIG, "at least one seed is required");
  P2PT_REQUIRE(seeds);
  return guarded([&] { exp->spec.seeds.assign(seeds, seeds + count); });
}

p2pt_status p2pt_experiment_set_output_dir(p2pt_experiment* exp, const char* path) {
  P2PT_REQUIRE(exp);
  P2PT_REQUIRE(path);
  return guarded([&] { exp->spec.output_dir = path; });
}

p2pt_status p2pt_experiment_set_jobs(p2pt_experiment* exp, unsigned jobs) {
  P2PT_REQUIRE(exp);
  if (jobs == 0) return fail(P2PT_ERR_CONFIG, "jobs must be >= 1");
  exp->spec.jobs = jobs;
  return P2PT_OK;
}

p2pt_status p2pt_experiment_run_count(const p2pt_experiment* exp, size_t* out) {
  P2PT_REQUIRE(exp);
  P2PT_REQUIRE(out);
  return guarded([&] { *out = exp->spec.expand().size(); });
}

p2pt_status p2pt_experiment_describe(p2pt_experiment* exp, const char** out) {
  P2PT_REQUIRE(exp);
  P2PT_REQUIRE(out);
  return guarded([&] {
    exp->description = p2ptrust::config_to_json(exp->spec.base);
    *out = exp->description.c_str();
  });
}

p2pt_status p2pt_experiment_run(const p2pt_experiment* exp, size_t* files_written) {
  P2PT_REQUIRE(exp);
  return guarded([&] {
    const auto entries = p2ptrust::run_experiment(exp->spec);
    if (files_written) *files_written = entries.size() + 1;
  });
}

p2pt_status p2pt_simulate(const p2pt_experiment* exp, uint64_t seed, p2pt_report** out) {
  P2PT_REQUIRE(exp);
  P2PT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    p2ptrust::SimConfig config = exp->spec.base;
    config.rng_seed = seed;
    *out = new p2pt_report{p2ptrust::run_simulation(config)};
  });
}

void p2pt_report_destroy(p2pt_report* report) { delete report; }

p2pt_status p2pt_report_iterations(const p2pt_report* report, size_t* out) {
  P2PT_REQUIRE(report);
  P2PT_REQUIRE(out);
  *out = report->report.metrics.size();
  return P2PT_OK;
}

p2pt_status p2pt_report_metrics(const p2pt_report* report, size_t index,
                                p2pt_iteration_metrics* out) {
  P2PT_REQUIRE(report);
  P2PT_REQUIRE(out);
  const auto& rows = report->report.metrics;
  if (index >= rows.size()) return fail(P2PT_ERR_OUT_OF_RANGE, "metrics index out of range");
  const auto& r = rows[index];
  *out = {r.iteration, r.delta_r_raw, r.delta_r_norm, r.utilization};
  return P2PT_OK;
}

p2pt_status p2pt_report_mean_delta_r(const p2pt_report* report, size_t first, size_t last,
                                     double* out) {
  P2PT_REQUIRE(report);
  P2PT_REQUIRE(out);
  const auto& rows = report->report.metrics;
  if (first == 0 || first > last || last > rows.size())
    return fail(P2PT_ERR_OUT_OF_RANGE, "iteration window out of range");
  double sum = 0.0;
  for (size_t i = first; i <= last; ++i) sum += rows[i - 1].delta_r_norm;
  *out = sum / static_cast<double>(last - first + 1);
  return P2PT_OK;
}

p2pt_status p2pt_report_write_csv(const p2pt_report* report, const char* path) {
  P2PT_REQUIRE(report);
  P2PT_REQUIRE(path);
  return guarded([&] { p2ptrust::emit_series(report->report, path); });
}

}  // extern "C"
