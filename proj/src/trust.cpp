#include "p2ptrust/trust.hpp"

#include <algorithm>
#include <cmath>

#include "p2ptrust/errors.hpp"

namespace p2ptrust {

double measure_ratio(double requested, double received) {
  if (!(requested > 0.0)) throw DomainError("undefined ratio: requested must be > 0");
  if (!(received >= 0.0)) throw InvariantError("received must be >= 0");
  if (received > requested) throw InvariantError("received exceeds requested");
  return received / requested;
}

TrustSample make_sample(NodeId observer, NodeId subject, std::uint64_t k, double requested,
                        double received) {
  return TrustSample{observer, subject, k, requested, received, measure_ratio(requested, received)};
}

double trust_refused_offer(const DeltaPolicy& policy) {
  double value = std::clamp(policy.delta, 0.0, 1.0);
  if (policy.total_requests_made > 0.0)
    value = std::min(value, policy.download_capacity / policy.total_requests_made);
  return value;
}

double trust_accepted_offer(const ServiceRates& rates) {
  if (!(rates.feasible > 0.0)) throw DomainError("feasible service rate must be > 0");
  if (!(rates.requested > 0.0)) throw DomainError("requested service rate must be > 0");
  if (rates.actual < 0.0 || rates.willing < 0.0) throw DomainError("rates must be >= 0");
  const double t = (rates.actual / rates.feasible) * (rates.willing / rates.requested);
  return std::clamp(t, 0.0, 1.0);
}

}  // namespace p2ptrust
