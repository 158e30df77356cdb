#include "lawn/topology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>

#include <omp.h>

#include "lawn/errors.hpp"
#include "lawn/format.hpp"

namespace lawn {

std::string_view to_string(EdgeKind kind) noexcept {
  return kind == EdgeKind::Connectivity ? "Connectivity" : "Interference";
}

std::size_t ActivationPattern::count() const noexcept {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

namespace {

bool is_candidate_pair(const Node& emt, const Node& other) noexcept {
  if (emt.id == other.id) return false;
  if (!is_emt(other.role)) return true;
  return other.id > emt.id;  // each E-MT pair once
}

// Edges contributed by E-MT row i, in ascending partner id.
std::vector<Edge> build_row(const Scenario& scenario, const ChannelParams& params, NodeId i,
                            double threshold_db, double interference_threshold_db) {
  std::vector<Edge> row;
  const Node& emt = scenario.node(i);
  for (const Node& other : scenario.nodes()) {
    if (!is_candidate_pair(emt, other)) continue;
    const LinkGain steered = link_gain(emt, other, params, true);
    const NodeId a = std::min(emt.id, other.id);
    const NodeId b = std::max(emt.id, other.id);
    if (steered.gain_db >= threshold_db) {
      row.push_back({a, b, EdgeKind::Connectivity, steered.gain_db, steered.distance_m});
    } else if (!is_emt(other.role) && interference_threshold_db < kNoInterferenceEdges) {
      const LinkGain off = link_gain(emt, other, params, false);
      if (off.gain_db >= interference_threshold_db)
        row.push_back({a, b, EdgeKind::Interference, off.gain_db, off.distance_m});
    }
  }
  return row;
}

std::vector<Edge> concat(std::vector<std::vector<Edge>>& rows) {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  std::vector<Edge> edges;
  edges.reserve(total);
  for (auto& r : rows) edges.insert(edges.end(), r.begin(), r.end());
  return edges;
}

}  // namespace

TopologyGraph TopologyGraph::assemble(const Scenario& scenario, std::vector<Edge> edges,
                                      double threshold_db, double interference_threshold_db) {
  std::vector<std::vector<Neighbor>> adjacency(scenario.size());
  for (std::uint32_t k = 0; k < edges.size(); ++k) {
    adjacency[edges[k].a].push_back({edges[k].b, k});
    adjacency[edges[k].b].push_back({edges[k].a, k});
  }
  for (auto& adj : adjacency)
    std::sort(adj.begin(), adj.end(),
              [](const Neighbor& x, const Neighbor& y) { return x.id < y.id; });
  auto built = std::make_shared<const Built>(Built{scenario, std::move(edges), std::move(adjacency),
                                                   threshold_db, interference_threshold_db});
  return TopologyGraph(std::move(built), ActivationPattern(scenario.size(), true));
}

TopologyGraph build_graph_serial(const Scenario& scenario, const ChannelParams& params,
                                 double threshold_db, double interference_threshold_db) {
  if (scenario.empty()) throw ContractViolation("build_graph: empty scenario");
  const auto emts = scenario.emt_ids();
  std::vector<std::vector<Edge>> rows(emts.size());
  for (std::size_t r = 0; r < emts.size(); ++r)
    rows[r] = build_row(scenario, params, emts[r], threshold_db, interference_threshold_db);
  return TopologyGraph::assemble(scenario, concat(rows), threshold_db, interference_threshold_db);
}

TopologyGraph build_graph(const Scenario& scenario, const ChannelParams& params,
                          double threshold_db, double interference_threshold_db) {
  if (scenario.empty()) throw ContractViolation("build_graph: empty scenario");
  const auto emts = scenario.emt_ids();
  const auto n_rows = static_cast<std::int64_t>(emts.size());
  std::vector<std::vector<Edge>> rows(emts.size());
  std::vector<std::exception_ptr> errors(emts.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t r = 0; r < n_rows; ++r) {
    try {
      rows[r] = build_row(scenario, params, emts[r], threshold_db, interference_threshold_db);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return TopologyGraph::assemble(scenario, concat(rows), threshold_db, interference_threshold_db);
}

TopologyGraph apply_activation(const TopologyGraph& graph, const ActivationPattern& pattern) {
  if (pattern.size() != graph.size())
    throw ContractViolation("activation pattern covers " + std::to_string(pattern.size()) +
                            " ids, graph has " + std::to_string(graph.size()));
  return TopologyGraph(graph.built_, pattern);
}

std::vector<Edge> TopologyGraph::live_edges() const {
  std::vector<Edge> out;
  for (const Edge& e : built_->edges)
    if (is_live(e)) out.push_back(e);
  return out;
}

std::size_t TopologyGraph::live_edge_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(built_->edges.begin(), built_->edges.end(),
                                                [this](const Edge& e) { return is_live(e); }));
}

const Edge* TopologyGraph::live_edge(NodeId a, NodeId b, EdgeKind kind) const noexcept {
  if (a >= size() || b >= size() || !active_[a] || !active_[b]) return nullptr;
  const auto& adj = built_->adjacency[a];
  auto it = std::lower_bound(adj.begin(), adj.end(), b,
                             [](const Neighbor& n, NodeId id) { return n.id < id; });
  for (; it != adj.end() && it->id == b; ++it) {
    const Edge& e = built_->edges[it->edge];
    if (e.kind == kind) return &e;
  }
  return nullptr;
}

namespace {

std::vector<std::pair<NodeId, std::vector<NodeId>>> overlaps_from(
    const TopologyGraph& graph, const std::function<bool(const Node&)>& side) {
  std::vector<std::pair<NodeId, std::vector<NodeId>>> out;
  for (const Node& n : graph.nodes()) {
    if (!side(n) || !graph.is_active(n.id)) continue;
    std::vector<NodeId> peers;
    graph.for_each_live_neighbor(n.id, EdgeKind::Connectivity, [&](NodeId other, const Edge&) {
      if (side(graph.scenario().node(other)) != side(n)) peers.push_back(other);
    });
    if (peers.size() >= 2) out.emplace_back(n.id, std::move(peers));
  }
  return out;
}

}  // namespace

std::vector<std::pair<NodeId, std::vector<NodeId>>> find_overlaps(const TopologyGraph& graph) {
  return overlaps_from(graph, [](const Node& n) { return is_emt(n.role); });
}

std::vector<std::pair<NodeId, std::vector<NodeId>>> find_user_side_overlaps(
    const TopologyGraph& graph) {
  return overlaps_from(graph, [](const Node& n) { return !is_emt(n.role); });
}

DegreeStats degree_stats(const TopologyGraph& graph) {
  DegreeStats s;
  const std::size_t n = graph.size();
  std::vector<std::size_t> degree(n, 0);
  // union-find over live edges
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : graph.built_edges()) {
    if (!graph.is_live(e)) continue;
    ++degree[e.a];
    ++degree[e.b];
    ++s.live_edges;
    parent[find(e.a)] = find(e.b);
  }
  bool first = true;
  std::size_t degree_sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!graph.is_active(static_cast<NodeId>(i))) continue;
    ++s.active_nodes;
    degree_sum += degree[i];
    s.min_degree = first ? degree[i] : std::min(s.min_degree, degree[i]);
    s.max_degree = std::max(s.max_degree, degree[i]);
    first = false;
    if (find(i) == i) ++s.components;
  }
  if (s.active_nodes > 0)
    s.mean_degree = static_cast<double>(degree_sum) / static_cast<double>(s.active_nodes);
  return s;
}

double calibrate_threshold(const Scenario& scenario, const ChannelParams& params,
                           double target_mean_degree) {
  if (!(target_mean_degree > 0.0)) throw ContractViolation("target mean degree must be > 0");
  std::vector<double> gains;
  for (NodeId i : scenario.emt_ids())
    for (const Node& other : scenario.nodes())
      if (is_candidate_pair(scenario.node(i), other))
        gains.push_back(link_gain(scenario.node(i), other, params, true).gain_db);
  if (gains.empty()) return 0.0;
  const auto wanted = static_cast<std::size_t>(
      std::llround(target_mean_degree * static_cast<double>(scenario.size()) / 2.0));
  const std::size_t k = std::clamp<std::size_t>(wanted, 1, gains.size());
  std::nth_element(gains.begin(), gains.begin() + static_cast<std::ptrdiff_t>(k - 1), gains.end(),
                   std::greater<>());
  return gains[k - 1];
}

void write_edge_list_csv(std::ostream& os, const TopologyGraph& graph) {
  os << "a,b,kind,weight_db,distance_m\n";
  for (const Edge& e : graph.built_edges()) {
    if (!graph.is_live(e)) continue;
    os << e.a << ',' << e.b << ',' << to_string(e.kind) << ',' << format_double(e.weight) << ','
       << format_double(e.distance_m) << '\n';
  }
}

}  // namespace lawn
