#pragma once

// Slotted-time resource sharing among peers that keep reputation tables.
//
// Each slot runs five phases for every node, in order:
//   query     - discover a random set of peers holding the resource
//   request   - ask each candidate for an equal share of an over-request
//   allocate  - providers pick whom to serve, weighted by reputation
//   transact  - requesters take offers up to their download capacity and
//               refuse the rest; lossy links may cap delivery
//   update    - requesters fold one trust sample per provider into their table
// After the update phase a reputation snapshot is taken and compared to the
// previous one.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "p2ptrust/estimator.hpp"
#include "p2ptrust/metrics.hpp"
#include "p2ptrust/rng.hpp"
#include "p2ptrust/tcp_model.hpp"
#include "p2ptrust/trust.hpp"

namespace p2ptrust {

enum class Population { homogeneous, heterogeneous };
enum class EstimatorKind { blue, baseline };
enum class C2Source { global, neighborhood };

std::string_view to_string(Population p);
std::string_view to_string(EstimatorKind k);
std::string_view to_string(C2Source s);
Population parse_population(std::string_view s);
EstimatorKind parse_estimator_kind(std::string_view s);
C2Source parse_c2_source(std::string_view s);

struct Range {
  double min = 0.0;
  double max = 0.0;
};

struct CountRange {
  std::uint32_t min = 1;
  std::uint32_t max = 1;
};

struct HomogeneousProfile {
  double download_capacity = 100.0;
  double upload_capacity = 100.0;
  std::uint32_t max_served_requests = 4;
};

struct HeterogeneousProfile {
  Range download_capacity{50.0, 150.0};
  Range upload_capacity{50.0, 150.0};
  CountRange max_served_requests{2, 8};
};

// Per-link TCP parameters. rtt and p are drawn once per ordered pair from the
// ranges; the packet rate is turned into resource units per slot with
// units_per_packet * slot_duration.
struct TcpLinkConfig {
  double w_max = 64.0;
  Range rtt{0.05, 0.3};
  double t0 = 1.0;
  int b = 2;
  Range p{0.001, 0.05};
  double units_per_packet = 1.0;
  double slot_duration = 1.0;
};

struct SimConfig {
  std::uint32_t node_count = 200;
  std::uint32_t iterations = 500;
  std::uint32_t acquaintance_iterations = 50;
  double delta = 0.3;
  double alpha = 0.1;
  Population population = Population::homogeneous;
  EstimatorKind estimator_kind = EstimatorKind::blue;
  std::uint64_t rng_seed = 1;
  bool tcp_enabled = false;
  TcpLinkConfig tcp;

  double overrequest = 2.0;
  CountRange candidates{3, 8};
  std::size_t baseline_window = kDefaultBaselineWindow;
  double sigma = 0.05;
  C2Source c2_source = C2Source::global;
  double free_rider_fraction = 0.0;
  bool record_transactions = false;

  HomogeneousProfile homogeneous;
  HeterogeneousProfile heterogeneous;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;
};

struct PeerNode {
  NodeId id{};
  double download_capacity = 0.0;
  double upload_capacity = 0.0;
  std::uint32_t max_served_requests = 1;
  bool free_rider = false;  // never allocates upload bandwidth
  std::map<NodeId, EstimatorState> reputation_table;
  DeltaPolicy delta_policy;

  double shared_capacity() const { return free_rider ? 0.0 : upload_capacity; }
};

struct Transaction {
  std::uint32_t slot = 0;
  NodeId requester{};
  NodeId provider{};
  double requested = 0.0;
  double allocated = 0.0;  // offered by the provider
  double received = 0.0;   // part of the offer the requester took
  double delivered = 0.0;  // after any link cap
  bool accepted = false;
  bool refused = false;  // offer made, nothing taken

  std::uint32_t served() const { return allocated > 0.0 ? 1u : 0u; }
};

struct AllocationRequest {
  NodeId requester{};
  double requested = 0.0;
  double reputation = 0.0;
};

struct SimReport {
  SimConfig config;
  std::vector<IterationMetrics> metrics;
  ReputationSnapshot final_reputations;
  std::vector<Transaction> transactions;  // empty unless record_transactions
};

struct SlotRecord {
  std::uint32_t slot = 0;
  std::span<const Transaction> transactions;
  std::span<const PeerNode> peers;
  const ReputationSnapshot& reputations;
  double total_shared_capacity = 0.0;
};

using SlotObserver = std::function<void(const SlotRecord&)>;

/// Random candidate providers for one node: between candidates.min and
/// candidates.max distinct peers other than node, capped at node_count - 1.
std::vector<NodeId> phase_query(NodeId node, std::uint32_t node_count, CountRange candidates,
                                Rng& rng);

/// Even split of overrequest * download_capacity over the candidates.
std::vector<Transaction> phase_request(const PeerNode& node, std::span<const NodeId> candidates,
                                       double overrequest, std::uint32_t slot);

/// Amount offered to each request. At most max_served_requests requesters are
/// drawn without replacement, with probability proportional to reputation
/// (uniform while acquainting). Chosen requesters split the upload capacity
/// in proportion to what they asked for, never beyond it.
std::vector<double> phase_allocate(const PeerNode& provider,
                                   std::span<const AllocationRequest> requests, bool acquaintance,
                                   Rng& rng);

/// Settles one requester's offers. Offers are taken in random order until
/// download_capacity is filled; the remainder is refused. link_caps, when
/// non-empty, bounds delivery per transaction.
void phase_transact(std::span<Transaction> transactions, double download_capacity,
                    std::span<const double> link_caps, Rng& rng);

/// Trust sample a requester derives from one settled transaction.
/// feasible_cap is the link's deliverable amount, or negative when the TCP
/// model is off.
double transaction_sample(const Transaction& tx, const DeltaPolicy& policy, double feasible_cap);

struct UpdateParams {
  double alpha = 0.1;
  std::size_t window = kDefaultBaselineWindow;
  std::span<const double> link_caps;  // empty when the TCP model is off
};

/// Feeds each of node's settled transactions through its estimator.
void phase_update_reputation(PeerNode& node, std::span<const Transaction> transactions,
                             const UpdateParams& params);

/// Queryable reputation of one table entry.
double reputation_value(const EstimatorState& state, EstimatorKind kind, const NoiseModel& noise);

/// Deliverable resource units per slot on the link requester <- provider.
double link_capacity(const SimConfig& config, NodeId requester, NodeId provider);

class Simulation {
public:
  explicit Simulation(SimConfig config);

  /// Runs one slot. Returns the metrics row for it.
  IterationMetrics step(const SlotObserver& observer = {});

  std::uint32_t slot() const { return slot_; }
  std::span<const PeerNode> peers() const { return peers_; }
  const ReputationSnapshot& reputations() const { return snapshot_; }
  double total_shared_capacity() const { return total_shared_; }
  const SimConfig& config() const { return config_; }
  std::vector<Transaction> take_transactions() { return std::move(log_); }

private:
  NoiseModel noise_for(std::size_t node) const;
  ReputationSnapshot take_snapshot() const;

  SimConfig config_;
  std::vector<PeerNode> peers_;
  double total_shared_ = 0.0;
  std::uint32_t slot_ = 0;
  ReputationSnapshot snapshot_;
  std::vector<Transaction> log_;

  // Per-slot scratch
  std::vector<double> requests_made_;
  std::vector<std::vector<NodeId>> candidates_;
  double total_requests_ = 0.0;
};

SimReport run_simulation(const SimConfig& config, const SlotObserver& observer = {});

}  // namespace p2ptrust
