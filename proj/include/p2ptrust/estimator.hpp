#pragma once

// Trust estimation from a stream of per-transaction measurements.
//
// Measurements follow x[n] = A - w[n] where the noise mean W is a fixed
// fraction C of A (a requester that over-asks refuses part of what it is
// offered, so the observed ratio is biased low). With i.i.d. noise of equal
// variance the best linear unbiased estimate of A is mean(x) / (1 - C). The
// running mean is either exact or exponentially weighted; the last-ten
// average is kept alongside as the comparison baseline.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace p2ptrust {

struct NoiseModel {
  double c1 = 0.0;
  double c2 = 0.0;
  double c = 0.0;
  double sigma = 1.0;
};

struct TrustEstimate {
  double value = 0.0;
  double raw_mean = 0.0;
  double correction = 0.0;
};

enum class MeanKind { exponential, arithmetic };

inline constexpr std::size_t kDefaultBaselineWindow = 10;

class EstimatorState {
public:
  explicit EstimatorState(double alpha = 0.1, std::size_t window = kDefaultBaselineWindow);

  /// In-place form of update_ema.
  void push(double sample);

  double alpha() const { return alpha_; }
  std::uint64_t sample_count() const { return count_; }
  /// Undefined (NaN) until the first sample.
  double ema_mean() const { return ema_; }
  /// Arithmetic mean of every sample seen. NaN until the first sample.
  double exact_mean() const;

  std::size_t window_capacity() const { return ring_.size(); }
  std::size_t window_size() const { return filled_; }
  /// Window contents, oldest first.
  std::vector<double> window() const;
  /// Mean over the window, oldest first summation.
  double window_mean() const;

private:
  double alpha_;
  double ema_;
  double sum_ = 0.0;
  std::uint64_t count_ = 0;
  std::vector<double> ring_;
  std::size_t head_ = 0;  // next slot to overwrite
  std::size_t filled_ = 0;
};

/// Returns a new state with sample folded in. The first sample seeds the
/// average; later ones apply alpha*x + (1-alpha)*mean.
EstimatorState update_ema(EstimatorState state, double sample);

/// mean / (1 - c), clamped to [0, 1]. Sigma does not enter: the identity
/// covariance cancels out of the linear estimator.
TrustEstimate blue_estimate(const EstimatorState& state, const NoiseModel& noise,
                            MeanKind mean = MeanKind::exponential);

/// Mean of the last window_capacity() raw samples.
double baseline_estimate(const EstimatorState& state);

/// c = 1 - 1/(c1*c2) when c1*c2 > 1, else 0.
NoiseModel compute_noise_model(double c1, double c2, double sigma);

/// Over-request ratio of a node: requests made / download capacity.
double estimate_c1(double requests_made, double download_capacity);

/// Network supply per unit of demand: shared capacity / requests.
double estimate_c2_global(double total_shared_capacity, double total_requests);

struct CapacityReport {
  double shared_capacity = 0.0;
  double requests = 0.0;
};

/// Local approximation of the network ratio from neighbour reports, as a
/// well connected node would gather it.
double estimate_c2_neighborhood(std::span<const CapacityReport> reports);

}  // namespace p2ptrust
