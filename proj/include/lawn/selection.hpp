#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "lawn/channel.hpp"
#include "lawn/topology.hpp"

namespace lawn {

struct ObjectiveWeights {
  double w_se = 1.0;
  double w_sens = 1.0;
  double w_wpt = 1.0;

  void validate() const;  // throws ConfigError
  friend bool operator==(const ObjectiveWeights&, const ObjectiveWeights&) = default;
};

struct SelectionParams {
  double qos_floor_db = 0.0;      // user-centric SNR floor
  std::size_t max_brute_force_users = 12;
  friend bool operator==(const SelectionParams&, const SelectionParams&) = default;
};

/// Roles carried by one E-MT. Its power is split equally over
/// comm_users + wpt_users + (sensing ? 1 : 0) shares.
struct EmtLoad {
  std::size_t comm_users = 0;
  std::size_t wpt_users = 0;
  bool sensing = false;

  std::size_t shares() const noexcept { return comm_users + wpt_users + (sensing ? 1 : 0); }
  double share_fraction() const noexcept {
    return shares() == 0 ? 0.0 : 1.0 / static_cast<double>(shares());
  }
  /// Shares that radiate interference (WPT never does).
  std::size_t interfering_shares() const noexcept { return comm_users + (sensing ? 1 : 0); }
};

struct ServiceAssignment {
  std::map<NodeId, NodeId> serving;                  // comm user -> E-MT
  std::optional<NodeId> sensing_target;
  std::optional<NodeId> sensing_tx;
  std::vector<NodeId> sensing_rx;                    // ascending
  std::map<NodeId, std::vector<NodeId>> wpt_sources; // charging user -> E-MTs, ascending
  std::map<NodeId, EmtLoad> loads;                   // E-MTs with >= 1 share
  std::map<NodeId, double> power_split;              // E-MT -> fraction per share

  const EmtLoad& load(NodeId emt) const noexcept;
};

struct SelectionMetrics {
  double sum_se = 0.0;           // bits/s/Hz
  double sensing_sinr_db = 0.0;  // -inf on outage
  bool sensing_outage = false;
  double wpt_energy_j = 0.0;
};

enum class SelectionMethod { NoSelection, UserCentric, TopologyAware, BruteForce };
std::string_view to_string(SelectionMethod m) noexcept;

struct SelectionResult {
  SelectionMethod method = SelectionMethod::NoSelection;
  ActivationPattern pattern;
  ServiceAssignment assignment;
  SelectionMetrics metrics;
  double scalar_objective = 0.0;
  /// Objective after each accepted greedy move, starting with the all-active
  /// value. Empty for the other methods.
  std::vector<double> objective_trace;

  std::size_t n_active_users(const TopologyGraph& graph) const;
};

/// Deterministic assignment under the graph's activation after applying
/// `pattern`: best-gain serving E-MT per active comm user (tie -> lowest id),
/// sensing transmitter = best-gain E-MT connected to the first active sensing
/// target, receivers = every other active E-MT connected to it, WPT sources =
/// every active E-MT connected to each active charging user.
ServiceAssignment make_assignment(const TopologyGraph& graph, const ActivationPattern& pattern);
/// Same, using the graph's current activation.
ServiceAssignment make_assignment(const TopologyGraph& graph);

/// Linear SINR per served user. Interference at user u comes from every active
/// E-MT with a live edge to u: its interfering shares times the off-beam gain,
/// where the serving E-MT contributes its other shares only.
std::map<NodeId, double> user_sinr(const TopologyGraph& graph, const ServiceAssignment& assignment,
                                   const ChannelParams& params);

/// Sum over served users of log2(1 + SINR).
double sum_spectral_efficiency(const TopologyGraph& graph, const ServiceAssignment& assignment,
                               const ChannelParams& params);

struct SensingSinr {
  double sinr_db = -std::numeric_limits<double>::infinity();
  bool outage = true;
  std::optional<NodeId> best_rx;
};

/// Best receiver's echo SINR; interference is the comm power of every active
/// E-MT other than the receiver with a live edge to it, via off-beam gains.
SensingSinr sensing_sinr(const TopologyGraph& graph, const ServiceAssignment& assignment,
                         const ChannelParams& params);

double wpt_energy(const TopologyGraph& graph, const ServiceAssignment& assignment,
                  const ChannelParams& params);

SelectionMetrics evaluate_metrics(const TopologyGraph& graph, const ServiceAssignment& assignment,
                                  const ChannelParams& params);

/// Baseline-normalised weighted sum; a zero normaliser uses the raw metric.
/// Sensing is compared in the linear domain (outage counts as 0).
double scalar_objective(const SelectionMetrics& metrics, const SelectionMetrics& baseline,
                        const ObjectiveWeights& weights);

SelectionResult select_none(const TopologyGraph& graph, const ChannelParams& params,
                            const ObjectiveWeights& weights);

SelectionResult select_user_centric(const TopologyGraph& graph, const ChannelParams& params,
                                    const ObjectiveWeights& weights,
                                    const SelectionParams& sel = {});

/// Greedy deletion. Each step evaluates every single-user deactivation (OpenMP)
/// and accepts the largest strict improvement, ties to the lowest user id.
SelectionResult select_topology_aware(const TopologyGraph& graph, const ChannelParams& params,
                                      const ObjectiveWeights& weights);
SelectionResult select_topology_aware_serial(const TopologyGraph& graph,
                                             const ChannelParams& params,
                                             const ObjectiveWeights& weights);

/// Exhaustive search over 2^k comm-user patterns; ties go to the
/// lexicographically smallest pattern (users in id order, inactive < active).
/// Throws ContractViolation when k > max_users.
SelectionResult select_brute_force(const TopologyGraph& graph, const ChannelParams& params,
                                   const ObjectiveWeights& weights, std::size_t max_users = 12);
SelectionResult select_brute_force_serial(const TopologyGraph& graph, const ChannelParams& params,
                                          const ObjectiveWeights& weights,
                                          std::size_t max_users = 12);

}  // namespace lawn
