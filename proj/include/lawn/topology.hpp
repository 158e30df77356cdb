#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "lawn/channel.hpp"
#include "lawn/scenario.hpp"

namespace lawn {

enum class EdgeKind { Connectivity, Interference };

std::string_view to_string(EdgeKind kind) noexcept;

/// Undirected edge with a < b. Connectivity edges carry the steered gain in dB,
/// interference edges the off-beam gain in dB. Routing uses distance_m.
struct Edge {
  NodeId a = 0;
  NodeId b = 0;
  EdgeKind kind = EdgeKind::Connectivity;
  double weight = 0.0;
  double distance_m = 0.0;

  NodeId other(NodeId v) const noexcept { return v == a ? b : a; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One flag per node id. Backed by bytes (not vector<bool>) so worker threads
/// can each own and mutate a copy without bit-packing surprises.
class ActivationPattern {
 public:
  ActivationPattern() = default;
  explicit ActivationPattern(std::size_t n, bool value = true) : flags_(n, value ? 1 : 0) {}

  std::size_t size() const noexcept { return flags_.size(); }
  bool operator[](NodeId id) const noexcept { return flags_[id] != 0; }
  void set(NodeId id, bool value) noexcept { flags_[id] = value ? 1 : 0; }
  std::size_t count() const noexcept;

  friend bool operator==(const ActivationPattern&, const ActivationPattern&) = default;

 private:
  std::vector<std::uint8_t> flags_;
};

struct DegreeStats {
  double mean_degree = 0.0;
  std::size_t min_degree = 0;
  std::size_t max_degree = 0;
  std::size_t components = 0;
  std::size_t active_nodes = 0;
  std::size_t live_edges = 0;
};

class TopologyGraph {
 public:
  struct Neighbor {
    NodeId id;
    std::uint32_t edge;  // index into built_edges()
  };

  const Scenario& scenario() const noexcept { return built_->scenario; }
  std::span<const Node> nodes() const noexcept { return built_->scenario.nodes(); }
  std::size_t size() const noexcept { return built_->scenario.size(); }
  double threshold_db() const noexcept { return built_->threshold_db; }
  double interference_threshold_db() const noexcept { return built_->interference_threshold_db; }

  const ActivationPattern& activation() const noexcept { return active_; }
  bool is_active(NodeId id) const noexcept { return active_[id]; }

  /// Edge set from construction, independent of activation.
  std::span<const Edge> built_edges() const noexcept { return built_->edges; }
  /// Built adjacency of v, sorted by neighbor id.
  std::span<const Neighbor> built_neighbors(NodeId v) const noexcept { return built_->adjacency[v]; }

  bool is_live(const Edge& e) const noexcept { return active_[e.a] && active_[e.b]; }
  std::vector<Edge> live_edges() const;
  std::size_t live_edge_count() const noexcept;
  /// Live edge between a and b of the given kind, or nullptr.
  const Edge* live_edge(NodeId a, NodeId b, EdgeKind kind) const noexcept;

  template <class F>
  void for_each_live_neighbor(NodeId v, EdgeKind kind, F&& f) const {
    if (!active_[v]) return;
    for (const Neighbor& nb : built_->adjacency[v]) {
      const Edge& e = built_->edges[nb.edge];
      if (e.kind == kind && active_[nb.id]) f(nb.id, e);
    }
  }

 private:
  struct Built {
    Scenario scenario;
    std::vector<Edge> edges;
    std::vector<std::vector<Neighbor>> adjacency;
    double threshold_db;
    double interference_threshold_db;
  };

  TopologyGraph(std::shared_ptr<const Built> built, ActivationPattern active)
      : built_(std::move(built)), active_(std::move(active)) {}

  static TopologyGraph assemble(const Scenario& scenario, std::vector<Edge> edges,
                                double threshold_db, double interference_threshold_db);

  friend TopologyGraph build_graph(const Scenario&, const ChannelParams&, double, double);
  friend TopologyGraph build_graph_serial(const Scenario&, const ChannelParams&, double, double);
  friend TopologyGraph apply_activation(const TopologyGraph&, const ActivationPattern&);

  std::shared_ptr<const Built> built_;
  ActivationPattern active_;
};

inline constexpr double kNoInterferenceEdges = std::numeric_limits<double>::infinity();

/// Connectivity edge for every (E-MT, non-E-MT) and (E-MT, E-MT) pair whose
/// steered gain is >= threshold_db. Optionally, (E-MT, non-E-MT) pairs without
/// a connectivity edge get an Interference edge when their off-beam gain is
/// >= interference_threshold_db. All nodes start active. OpenMP over E-MT rows;
/// the result is identical to build_graph_serial.
TopologyGraph build_graph(const Scenario& scenario, const ChannelParams& params,
                          double threshold_db,
                          double interference_threshold_db = kNoInterferenceEdges);
TopologyGraph build_graph_serial(const Scenario& scenario, const ChannelParams& params,
                                 double threshold_db,
                                 double interference_threshold_db = kNoInterferenceEdges);

/// New graph sharing the built edge set with the given activation states.
/// Throws ContractViolation if the pattern size differs from the node count.
TopologyGraph apply_activation(const TopologyGraph& graph, const ActivationPattern& pattern);

/// Active E-MTs with >= 2 active non-E-MT neighbours over Connectivity edges,
/// ascending by E-MT id, neighbour lists ascending.
std::vector<std::pair<NodeId, std::vector<NodeId>>> find_overlaps(const TopologyGraph& graph);
/// Mirror image: active non-E-MT nodes connected to >= 2 active E-MTs.
std::vector<std::pair<NodeId, std::vector<NodeId>>> find_user_side_overlaps(
    const TopologyGraph& graph);

/// Over active nodes and live edges of both kinds.
DegreeStats degree_stats(const TopologyGraph& graph);

/// Threshold (dB) at which the candidate-pair edge count is
/// round(target_mean_degree * N / 2), i.e. the mean degree over all N nodes
/// matches the target up to gain ties.
double calibrate_threshold(const Scenario& scenario, const ChannelParams& params,
                           double target_mean_degree);

/// CSV columns: a,b,kind,weight_db,distance_m (live edges only).
void write_edge_list_csv(std::ostream& os, const TopologyGraph& graph);

}  // namespace lawn
