#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "lawn/topology.hpp"

namespace lawn {

struct DeliveryTask {
  NodeId src = 0;
  NodeId dst = 0;
};

struct Route {
  std::vector<NodeId> hops;  // src ... dst
  double total_distance_m = 0.0;

  std::size_t hop_count() const noexcept { return hops.empty() ? 0 : hops.size() - 1; }
};

enum class RouteMethod { TaDijkstra, GreedyLocal, GreedyReachable };
inline constexpr std::array<RouteMethod, 3> kRouteMethods{
    RouteMethod::TaDijkstra, RouteMethod::GreedyLocal, RouteMethod::GreedyReachable};
std::string_view to_string(RouteMethod m) noexcept;

struct DeliveryParams {
  double hop_processing_s = 1e-3;
  friend bool operator==(const DeliveryParams&, const DeliveryParams&) = default;
};

struct DeliveryOutcome {
  RouteMethod method = RouteMethod::TaDijkstra;
  bool success = false;
  std::optional<Route> route;
  double delay_s = 0.0;  // meaningful only on success
};

/// Propagation over every hop plus a fixed processing time per hop.
double route_delay(const Route& route, const DeliveryParams& params);

/// Structural Route invariants against the graph: live E-MT edges between
/// consecutive hops, no repeated node, distance equals the hop sum.
bool route_is_valid(const TopologyGraph& graph, const Route& route);

// All three route over active E-MTs and live Connectivity edges, weighted by
// Euclidean distance. src/dst must be distinct active E-MTs (ContractViolation).

/// Minimum total distance; ties -> fewer hops -> lexicographically smaller hops.
DeliveryOutcome dijkstra_route(const TopologyGraph& graph, const DeliveryTask& task,
                               const DeliveryParams& params = {});
/// Always steps to the nearest unvisited neighbour; no backtracking.
DeliveryOutcome greedy_local_route(const TopologyGraph& graph, const DeliveryTask& task,
                                   const DeliveryParams& params = {});
/// Nearest-first depth-first search with backtracking and a global visited set.
DeliveryOutcome greedy_reachable_route(const TopologyGraph& graph, const DeliveryTask& task,
                                       const DeliveryParams& params = {});
DeliveryOutcome route_with(RouteMethod method, const TopologyGraph& graph,
                           const DeliveryTask& task, const DeliveryParams& params = {});

struct DeliveryTrial {
  std::uint64_t index = 0;
  DeliveryTask task;
  std::array<DeliveryOutcome, 3> outcomes;  // in kRouteMethods order
};

struct MethodAggregate {
  RouteMethod method = RouteMethod::TaDijkstra;
  std::size_t n_trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  // Over trials where all three methods succeeded; NaN if there are none.
  double mean_delay_ms = 0.0;
  double median_delay_ms = 0.0;
  double mean_hops = 0.0;
};

struct DeliveryReport {
  std::array<MethodAggregate, 3> methods;
  std::size_t mutually_successful = 0;
  std::vector<DeliveryTrial> trials;
};

/// (src, dst) per trial drawn without replacement from the active E-MTs using
/// Rng::stream(seed, trial). Trials run under OpenMP and are aggregated in
/// trial order, so the report equals run_delivery_experiment_serial's.
DeliveryReport run_delivery_experiment(const TopologyGraph& graph, const DeliveryParams& params,
                                       std::size_t n_trials, std::uint64_t seed);
DeliveryReport run_delivery_experiment_serial(const TopologyGraph& graph,
                                              const DeliveryParams& params, std::size_t n_trials,
                                              std::uint64_t seed);
DeliveryReport run_delivery_experiment(const Scenario& scenario, const ChannelParams& channel,
                                       double threshold_db, const DeliveryParams& params,
                                       std::size_t n_trials, std::uint64_t seed);

DeliveryTask draw_task(const std::vector<NodeId>& emts, std::uint64_t seed, std::uint64_t trial);

/// method,n_trials,success_rate,mean_delay_ms,median_delay_ms,mean_hops
void write_delivery_csv(std::ostream& os, const DeliveryReport& report);
/// One JSON object per trial and method.
void write_delivery_trials_jsonl(std::ostream& os, const DeliveryReport& report);

}  // namespace lawn
