#pragma once

// Per-transaction trust measurement.
//
// A requester i asks provider j for R units and receives Z units. The raw
// measurement is Z/R. When j made an offer that i did not take, i credits j
// with a fixed delta instead. When the transfer ran over a lossy path, the
// delivered rate is judged against what the path could carry, and the
// provider's commitment is judged against the request.

#include <compare>
#include <cstdint>

namespace p2ptrust {

enum class NodeId : std::uint32_t {};

constexpr std::uint32_t to_index(NodeId id) { return static_cast<std::uint32_t>(id); }

struct TrustSample {
  NodeId observer{};
  NodeId subject{};
  std::uint64_t transaction_index = 1;
  double requested = 0.0;
  double received = 0.0;
  double value = 0.0;
};

struct ServiceRates {
  double actual = 0.0;
  double feasible = 0.0;
  double willing = 0.0;
  double requested = 0.0;
};

struct DeltaPolicy {
  double delta = 0.3;
  double download_capacity = 1.0;
  double total_requests_made = 0.0;
};

/// received / requested. Throws DomainError when requested <= 0 and
/// InvariantError when received > requested or received < 0.
double measure_ratio(double requested, double received);

/// Builds a TrustSample through measure_ratio.
TrustSample make_sample(NodeId observer, NodeId subject, std::uint64_t k, double requested,
                        double received);

/// Credit for an offer the requester declined. The node caps delta at
/// download_capacity / total_requests_made so that offering-then-denying is
/// never worth more than what it could have consumed.
double trust_refused_offer(const DeltaPolicy& policy);

/// (actual / feasible) * (willing / requested), clamped to [0, 1].
double trust_accepted_offer(const ServiceRates& rates);

}  // namespace p2ptrust
