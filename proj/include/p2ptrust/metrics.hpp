#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "p2ptrust/trust.hpp"

namespace p2ptrust {

struct ReputationEntry {
  NodeId subject{};
  double value = 0.0;
};

// Reputation values held by every observer at one instant. rows[i] belongs to
// observer i and is sorted by subject.
struct ReputationSnapshot {
  std::vector<std::vector<ReputationEntry>> rows;

  std::size_t pair_count() const;
};

struct DeltaR {
  double sum = 0.0;
  std::size_t pairs = 0;  // pairs present in both snapshots

  double normalized() const { return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs); }
};

struct IterationMetrics {
  std::size_t iteration = 0;
  double delta_r_raw = 0.0;
  double delta_r_norm = 0.0;
  double utilization = 0.0;
};

/// Sum of |R_curr - R_prev| over (observer, subject) pairs present in both
/// snapshots. A pair seen for the first time contributes nothing.
DeltaR delta_r(const ReputationSnapshot& prev, const ReputationSnapshot& curr);

/// Delivered volume as a fraction of the capacity offered to the network.
double utilization(std::span<const double> delivered, double total_shared_capacity);

}  // namespace p2ptrust
