#include "p2ptrust/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "p2ptrust/errors.hpp"

namespace p2ptrust {

std::size_t ReputationSnapshot::pair_count() const {
  std::size_t n = 0;
  for (const auto& row : rows) n += row.size();
  return n;
}

DeltaR delta_r(const ReputationSnapshot& prev, const ReputationSnapshot& curr) {
  DeltaR out;
  const std::size_t observers = std::min(prev.rows.size(), curr.rows.size());
  for (std::size_t i = 0; i < observers; ++i) {
    const auto& a = prev.rows[i];
    const auto& b = curr.rows[i];
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (ia->subject < ib->subject) {
        ++ia;
      } else if (ib->subject < ia->subject) {
        ++ib;
      } else {
        out.sum += std::abs(ib->value - ia->value);
        ++out.pairs;
        ++ia;
        ++ib;
      }
    }
  }
  return out;
}

double utilization(std::span<const double> delivered, double total_shared_capacity) {
  if (!(total_shared_capacity > 0.0)) throw DomainError("total shared capacity must be > 0");
  double sum = 0.0;
  for (double d : delivered) sum += d;
  return sum / total_shared_capacity;
}

}  // namespace p2ptrust
