#include "p2ptrust/tcp_model.hpp"

#include <algorithm>
#include <cmath>

#include "p2ptrust/errors.hpp"

namespace p2ptrust {

double feasible_rate(const TcpParams& params) {
  if (!(params.w_max > 0.0) || !(params.rtt > 0.0) || !(params.t0 > 0.0) || params.b <= 0)
    throw DomainError("tcp parameters must be strictly positive");
  if (!(params.p >= 0.0) || params.p > 1.0)
    throw DomainError("loss probability must lie in [0, 1]");

  const double window_limit = params.w_max / params.rtt;
  if (params.p == 0.0) return window_limit;

  const double p = params.p;
  const double b = static_cast<double>(params.b);
  const double fast_retransmit = params.rtt * std::sqrt(2.0 * b * p / 3.0);
  const double timeouts =
      params.t0 * std::min(1.0, 3.0 * std::sqrt(3.0 * b * p / 8.0)) * p * (1.0 + 32.0 * p * p);
  return std::min(window_limit, 1.0 / (fast_retransmit + timeouts));
}

}  // namespace p2ptrust
