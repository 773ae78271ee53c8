#include "p2ptrust/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "p2ptrust/errors.hpp"

namespace p2ptrust {

std::string_view to_string(Population p) {
  return p == Population::homogeneous ? "homogeneous" : "heterogeneous";
}

std::string_view to_string(EstimatorKind k) {
  return k == EstimatorKind::blue ? "blue" : "baseline";
}

std::string_view to_string(C2Source s) {
  return s == C2Source::global ? "global" : "neighborhood";
}

Population parse_population(std::string_view s) {
  if (s == "homogeneous") return Population::homogeneous;
  if (s == "heterogeneous") return Population::heterogeneous;
  throw ConfigError("unknown population '" + std::string(s) + "'");
}

EstimatorKind parse_estimator_kind(std::string_view s) {
  if (s == "blue") return EstimatorKind::blue;
  if (s == "baseline") return EstimatorKind::baseline;
  throw ConfigError("unknown estimator_kind '" + std::string(s) + "'");
}

C2Source parse_c2_source(std::string_view s) {
  if (s == "global") return C2Source::global;
  if (s == "neighborhood") return C2Source::neighborhood;
  throw ConfigError("unknown c2_source '" + std::string(s) + "'");
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

void require_range(const Range& r, const char* what) {
  require(r.min > 0.0 && r.min <= r.max && std::isfinite(r.max), what);
}

}  // namespace

void SimConfig::validate() const {
  require(node_count >= 2, "node_count must be >= 2");
  require(iterations >= 1, "iterations must be >= 1");
  require(acquaintance_iterations < iterations, "acquaintance_iterations must be < iterations");
  require(delta >= 0.0 && delta <= 1.0, "delta must lie in [0, 1]");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  require(overrequest >= 1.0 && std::isfinite(overrequest), "overrequest must be >= 1");
  require(candidates.min >= 1 && candidates.min <= candidates.max,
          "candidates must satisfy 1 <= min <= max");
  require(baseline_window >= 1, "baseline_window must be >= 1");
  require(sigma > 0.0, "sigma must be > 0");
  require(free_rider_fraction >= 0.0 && free_rider_fraction < 1.0,
          "free_rider_fraction must lie in [0, 1)");
  require(static_cast<std::uint32_t>(free_rider_fraction * node_count) < node_count,
          "at least one node must share capacity");
  require(homogeneous.download_capacity > 0.0 && homogeneous.upload_capacity > 0.0,
          "homogeneous capacities must be > 0");
  require(homogeneous.max_served_requests >= 1, "homogeneous max_served_requests must be >= 1");
  require_range(heterogeneous.download_capacity, "heterogeneous download_capacity range invalid");
  require_range(heterogeneous.upload_capacity, "heterogeneous upload_capacity range invalid");
  require(heterogeneous.max_served_requests.min >= 1 &&
              heterogeneous.max_served_requests.min <= heterogeneous.max_served_requests.max,
          "heterogeneous max_served_requests range invalid");
  if (tcp_enabled) {
    require(tcp.w_max > 0.0 && tcp.t0 > 0.0 && tcp.b >= 1, "tcp w_max, t0, b must be > 0");
    require_range(tcp.rtt, "tcp rtt range invalid");
    require(tcp.p.min >= 0.0 && tcp.p.min <= tcp.p.max && tcp.p.max <= 1.0,
            "tcp p range must lie in [0, 1]");
    require(tcp.units_per_packet > 0.0 && tcp.slot_duration > 0.0,
            "tcp units_per_packet and slot_duration must be > 0");
  }
}

std::vector<NodeId> phase_query(NodeId node, std::uint32_t node_count, CountRange candidates,
                                Rng& rng) {
  const std::uint32_t others = node_count - 1;
  if (others == 0) return {};
  const std::uint32_t hi = std::min(candidates.max, others);
  const std::uint32_t lo = std::min(candidates.min, hi);
  const auto k = static_cast<std::uint32_t>(rng.between(lo, hi));

  std::vector<std::uint32_t> pool(others);
  for (std::uint32_t i = 0, v = 0; v < node_count; ++v)
    if (v != to_index(node)) pool[i++] = v;
  std::vector<NodeId> out;
  out.reserve(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.below(others - i));
    std::swap(pool[i], pool[j]);
    out.push_back(NodeId{pool[i]});
  }
  return out;
}

std::vector<Transaction> phase_request(const PeerNode& node, std::span<const NodeId> candidates,
                                       double overrequest, std::uint32_t slot) {
  std::vector<Transaction> out;
  if (candidates.empty()) return out;
  const double each =
      overrequest * node.download_capacity / static_cast<double>(candidates.size());
  out.reserve(candidates.size());
  for (NodeId provider : candidates) {
    Transaction tx;
    tx.slot = slot;
    tx.requester = node.id;
    tx.provider = provider;
    tx.requested = each;
    out.push_back(tx);
  }
  return out;
}

std::vector<double> phase_allocate(const PeerNode& provider,
                                   std::span<const AllocationRequest> requests, bool acquaintance,
                                   Rng& rng) {
  std::vector<double> allocation(requests.size(), 0.0);
  if (provider.free_rider || requests.empty()) return allocation;

  std::vector<double> weight(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i)
    weight[i] = acquaintance ? 1.0 : std::max(0.0, requests[i].reputation);

  std::vector<std::size_t> chosen;
  const std::size_t slots = std::min<std::size_t>(provider.max_served_requests, requests.size());
  while (chosen.size() < slots) {
    const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
    if (!(total > 0.0)) break;
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = requests.size();
    for (std::size_t i = 0; i < weight.size(); ++i) {
      if (weight[i] <= 0.0) continue;
      pick = i;  // last positive weight absorbs rounding at the top end
      acc += weight[i];
      if (target < acc) break;
    }
    chosen.push_back(pick);
    weight[pick] = 0.0;
  }

  double asked = 0.0;
  for (std::size_t i : chosen) asked += requests[i].requested;
  if (!(asked > 0.0)) return allocation;
  const double share = std::min(1.0, provider.upload_capacity / asked);
  for (std::size_t i : chosen) allocation[i] = requests[i].requested * share;
  return allocation;
}

void phase_transact(std::span<Transaction> transactions, double download_capacity,
                    std::span<const double> link_caps, Rng& rng) {
  std::vector<std::size_t> order(transactions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);

  double room = download_capacity;
  for (std::size_t idx : order) {
    Transaction& tx = transactions[idx];
    const double take = std::min(tx.allocated, room);
    room -= take;
    tx.received = take;
    tx.accepted = take > 0.0;
    tx.refused = tx.allocated > 0.0 && !tx.accepted;
    tx.delivered = link_caps.empty() ? take : std::min(take, link_caps[idx]);
  }
}

double transaction_sample(const Transaction& tx, const DeltaPolicy& policy, double feasible_cap) {
  if (tx.refused) return trust_refused_offer(policy);
  if (feasible_cap >= 0.0 && tx.received > 0.0) {
    ServiceRates rates;
    rates.actual = tx.delivered;
    rates.feasible = std::min(feasible_cap, tx.received);
    rates.willing = tx.received;
    rates.requested = tx.requested;
    return trust_accepted_offer(rates);
  }
  return measure_ratio(tx.requested, tx.received);
}

void phase_update_reputation(PeerNode& node, std::span<const Transaction> transactions,
                             const UpdateParams& params) {
  for (std::size_t i = 0; i < transactions.size(); ++i) {
    const Transaction& tx = transactions[i];
    const double cap = params.link_caps.empty() ? -1.0 : params.link_caps[i];
    const double sample = transaction_sample(tx, node.delta_policy, cap);
    auto it = node.reputation_table.try_emplace(tx.provider, params.alpha, params.window).first;
    it->second.push(sample);
  }
}

double reputation_value(const EstimatorState& state, EstimatorKind kind, const NoiseModel& noise) {
  return kind == EstimatorKind::blue ? blue_estimate(state, noise).value : baseline_estimate(state);
}

double link_capacity(const SimConfig& config, NodeId requester, NodeId provider) {
  Rng rng(derive_seed(config.rng_seed, to_index(requester), to_index(provider), Phase::link));
  TcpParams params;
  params.w_max = config.tcp.w_max;
  params.t0 = config.tcp.t0;
  params.b = config.tcp.b;
  params.rtt = rng.uniform(config.tcp.rtt.min, config.tcp.rtt.max);
  params.p = rng.uniform(config.tcp.p.min, config.tcp.p.max);
  return feasible_rate(params) * config.tcp.units_per_packet * config.tcp.slot_duration;
}

Simulation::Simulation(SimConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::uint32_t n = config_.node_count;
  peers_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    PeerNode& p = peers_[i];
    p.id = NodeId{i};
    if (config_.population == Population::homogeneous) {
      p.download_capacity = config_.homogeneous.download_capacity;
      p.upload_capacity = config_.homogeneous.upload_capacity;
      p.max_served_requests = config_.homogeneous.max_served_requests;
    } else {
      Rng rng(derive_seed(config_.rng_seed, 0, i, Phase::setup));
      const auto& h = config_.heterogeneous;
      p.download_capacity = rng.uniform(h.download_capacity.min, h.download_capacity.max);
      p.upload_capacity = rng.uniform(h.upload_capacity.min, h.upload_capacity.max);
      p.max_served_requests =
          static_cast<std::uint32_t>(rng.between(h.max_served_requests.min, h.max_served_requests.max));
    }
    p.delta_policy.delta = config_.delta;
    p.delta_policy.download_capacity = p.download_capacity;
  }

  const auto riders = static_cast<std::uint32_t>(config_.free_rider_fraction * n);
  if (riders > 0) {
    Rng rng(derive_seed(config_.rng_seed, 0, n, Phase::setup));
    std::vector<std::uint32_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0u);
    for (std::uint32_t i = 0; i < riders; ++i) {
      std::swap(ids[i], ids[i + rng.below(n - i)]);
      peers_[ids[i]].free_rider = true;
    }
  }

  for (const auto& p : peers_) total_shared_ += p.shared_capacity();
  snapshot_.rows.resize(n);
  requests_made_.assign(n, 0.0);
  candidates_.resize(n);
}

NoiseModel Simulation::noise_for(std::size_t node) const {
  const PeerNode& p = peers_[node];
  const double c1 = estimate_c1(requests_made_[node], p.download_capacity);
  double c2 = 0.0;
  if (config_.c2_source == C2Source::global) {
    c2 = estimate_c2_global(total_shared_, total_requests_);
  } else {
    std::vector<CapacityReport> reports;
    reports.reserve(candidates_[node].size());
    for (NodeId j : candidates_[node])
      reports.push_back({peers_[to_index(j)].shared_capacity(), requests_made_[to_index(j)]});
    c2 = estimate_c2_neighborhood(reports);
  }
  return compute_noise_model(c1, c2, config_.sigma);
}

ReputationSnapshot Simulation::take_snapshot() const {
  ReputationSnapshot snap;
  snap.rows.resize(peers_.size());
  for (std::size_t i = 0; i < peers_.size(); ++i) {
    const NoiseModel noise = noise_for(i);
    auto& row = snap.rows[i];
    row.reserve(peers_[i].reputation_table.size());
    for (const auto& [subject, state] : peers_[i].reputation_table)
      row.push_back({subject, reputation_value(state, config_.estimator_kind, noise)});
  }
  return snap;
}

IterationMetrics Simulation::step(const SlotObserver& observer) {
  if (slot_ >= config_.iterations) throw InvariantError("simulation already finished");
  const std::uint32_t slot = ++slot_;
  const std::uint32_t n = config_.node_count;
  const std::uint64_t seed = config_.rng_seed;

  // query + request
  std::vector<Transaction> txs;
  std::vector<std::size_t> first(n + 1, 0);
  total_requests_ = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, slot, i, Phase::query));
    candidates_[i] = phase_query(NodeId{i}, n, config_.candidates, rng);
    auto mine = phase_request(peers_[i], candidates_[i], config_.overrequest, slot);
    double asked = 0.0;
    for (const auto& tx : mine) asked += tx.requested;
    requests_made_[i] = asked;
    peers_[i].delta_policy.total_requests_made = asked;
    total_requests_ += asked;
    first[i] = txs.size();
    txs.insert(txs.end(), mine.begin(), mine.end());
  }
  first[n] = txs.size();

  // allocate
  std::vector<std::vector<std::size_t>> incoming(n);
  for (std::size_t t = 0; t < txs.size(); ++t) incoming[to_index(txs[t].provider)].push_back(t);
  const bool acquainting = slot <= config_.acquaintance_iterations;
  for (std::uint32_t j = 0; j < n; ++j) {
    if (incoming[j].empty()) continue;
    const PeerNode& provider = peers_[j];
    const NoiseModel noise = noise_for(j);
    std::vector<AllocationRequest> reqs;
    reqs.reserve(incoming[j].size());
    for (std::size_t t : incoming[j]) {
      const auto it = provider.reputation_table.find(txs[t].requester);
      const double rep = it == provider.reputation_table.end()
                             ? config_.delta
                             : reputation_value(it->second, config_.estimator_kind, noise);
      reqs.push_back({txs[t].requester, txs[t].requested, rep});
    }
    Rng rng(derive_seed(seed, slot, j, Phase::allocate));
    const auto offers = phase_allocate(provider, reqs, acquainting, rng);
    for (std::size_t k = 0; k < offers.size(); ++k) txs[incoming[j][k]].allocated = offers[k];
  }

  // transact + update
  std::vector<double> caps;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::span<Transaction> mine(txs.data() + first[i], first[i + 1] - first[i]);
    caps.clear();
    if (config_.tcp_enabled)
      for (const auto& tx : mine) caps.push_back(link_capacity(config_, tx.requester, tx.provider));
    Rng rng(derive_seed(seed, slot, i, Phase::transact));
    phase_transact(mine, peers_[i].download_capacity, caps, rng);
    phase_update_reputation(peers_[i], mine,
                            UpdateParams{config_.alpha, config_.baseline_window, caps});
  }

  ReputationSnapshot next = take_snapshot();
  const DeltaR change = delta_r(snapshot_, next);
  snapshot_ = std::move(next);

  std::vector<double> delivered;
  delivered.reserve(txs.size());
  for (const auto& tx : txs) delivered.push_back(tx.delivered);

  IterationMetrics row;
  row.iteration = slot;
  row.delta_r_raw = change.sum;
  row.delta_r_norm = change.normalized();
  row.utilization = utilization(delivered, total_shared_);

  if (observer) observer(SlotRecord{slot, txs, peers_, snapshot_, total_shared_});
  if (config_.record_transactions) log_.insert(log_.end(), txs.begin(), txs.end());
  return row;
}

SimReport run_simulation(const SimConfig& config, const SlotObserver& observer) {
  Simulation sim(config);
  SimReport report;
  report.config = sim.config();
  report.metrics.reserve(config.iterations);
  for (std::uint32_t s = 0; s < config.iterations; ++s) report.metrics.push_back(sim.step(observer));
  report.final_reputations = sim.reputations();
  report.transactions = sim.take_transactions();
  return report;
}

}  // namespace p2ptrust
