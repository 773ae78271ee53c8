#pragma once

namespace p2ptrust {

// Steady-state TCP Reno throughput. Windows are in packets, times in seconds.
struct TcpParams {
  double w_max = 64.0;
  double rtt = 0.1;
  double t0 = 1.0;
  int b = 2;
  double p = 0.01;
};

/// Feasible sending rate in packets/second:
///   min(w_max/rtt, 1 / (rtt*sqrt(2bp/3) + t0*min(1, 3*sqrt(3bp/8))*p*(1+32p^2)))
/// p == 0 is the loss-free path and returns the window limit.
double feasible_rate(const TcpParams& params);

}  // namespace p2ptrust
