#include "p2ptrust/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "p2ptrust/errors.hpp"

namespace p2ptrust {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

EstimatorState::EstimatorState(double alpha, std::size_t window)
    : alpha_(alpha), ema_(kNaN), ring_(window, 0.0) {
  if (!(alpha > 0.0) || alpha > 1.0) throw DomainError("alpha must lie in (0, 1]");
  if (window == 0) throw DomainError("baseline window must hold at least one sample");
}

void EstimatorState::push(double sample) {
  if (!(sample >= 0.0) || sample > 1.0) throw DomainError("trust sample outside [0, 1]");
  ema_ = count_ == 0 ? sample : alpha_ * sample + (1.0 - alpha_) * ema_;
  sum_ += sample;
  ++count_;
  ring_[head_] = sample;
  head_ = (head_ + 1) % ring_.size();
  filled_ = std::min(filled_ + 1, ring_.size());
}

double EstimatorState::exact_mean() const {
  return count_ == 0 ? kNaN : sum_ / static_cast<double>(count_);
}

std::vector<double> EstimatorState::window() const {
  std::vector<double> out;
  out.reserve(filled_);
  const std::size_t start = (head_ + ring_.size() - filled_) % ring_.size();
  for (std::size_t i = 0; i < filled_; ++i) out.push_back(ring_[(start + i) % ring_.size()]);
  return out;
}

double EstimatorState::window_mean() const {
  if (filled_ == 0) return kNaN;
  const std::size_t start = (head_ + ring_.size() - filled_) % ring_.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < filled_; ++i) sum += ring_[(start + i) % ring_.size()];
  return sum / static_cast<double>(filled_);
}

EstimatorState update_ema(EstimatorState state, double sample) {
  state.push(sample);
  return state;
}

TrustEstimate blue_estimate(const EstimatorState& state, const NoiseModel& noise, MeanKind mean) {
  if (state.sample_count() == 0) throw NoSamplesError();
  if (!(noise.c >= 0.0) || !(noise.c < 1.0)) throw DomainError("noise ratio C must lie in [0, 1)");
  const double raw = mean == MeanKind::exponential ? state.ema_mean() : state.exact_mean();
  return TrustEstimate{std::clamp(raw / (1.0 - noise.c), 0.0, 1.0), raw, noise.c};
}

double baseline_estimate(const EstimatorState& state) {
  if (state.window_size() == 0) throw NoSamplesError();
  return state.window_mean();
}

NoiseModel compute_noise_model(double c1, double c2, double sigma) {
  if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw DomainError("C1 and C2 must be >= 0");
  if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
  const double product = c1 * c2;
  const double c = product > 1.0 ? 1.0 - 1.0 / product : 0.0;
  return NoiseModel{c1, c2, c, sigma};
}

double estimate_c1(double requests_made, double download_capacity) {
  if (!(download_capacity > 0.0)) throw DomainError("download capacity must be > 0");
  if (!(requests_made >= 0.0)) throw DomainError("requests made must be >= 0");
  return requests_made / download_capacity;
}

double estimate_c2_global(double total_shared_capacity, double total_requests) {
  if (!(total_requests > 0.0)) throw DomainError("total requests must be > 0");
  if (!(total_shared_capacity >= 0.0)) throw DomainError("shared capacity must be >= 0");
  return total_shared_capacity / total_requests;
}

double estimate_c2_neighborhood(std::span<const CapacityReport> reports) {
  double shared = 0.0;
  double requests = 0.0;
  for (const auto& r : reports) {
    shared += r.shared_capacity;
    requests += r.requests;
  }
  return estimate_c2_global(shared, requests);
}

}  // namespace p2ptrust
