#include "lawn/delivery.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <queue>
#include <string>
#include <tuple>

#include "json.hpp"
#include <omp.h>

#include "lawn/channel.hpp"
#include "lawn/errors.hpp"
#include "lawn/format.hpp"
#include "lawn/rng.hpp"

namespace lawn {

std::string_view to_string(RouteMethod m) noexcept {
  switch (m) {
    case RouteMethod::TaDijkstra: return "TaDijkstra";
    case RouteMethod::GreedyLocal: return "GreedyLocal";
    case RouteMethod::GreedyReachable: return "GreedyReachable";
  }
  return "Unknown";
}

namespace {

struct Hop {
  NodeId to;
  double distance_m;
};

// Routing neighbours of v: active E-MTs over live Connectivity edges,
// ascending id.
std::vector<Hop> routing_neighbors(const TopologyGraph& graph, NodeId v) {
  std::vector<Hop> out;
  graph.for_each_live_neighbor(v, EdgeKind::Connectivity, [&](NodeId other, const Edge& e) {
    if (is_emt(graph.scenario().node(other).role)) out.push_back({other, e.distance_m});
  });
  return out;
}

// Nearest first; equal distance -> lower id.
std::vector<Hop> by_distance(std::vector<Hop> hops) {
  std::stable_sort(hops.begin(), hops.end(), [](const Hop& x, const Hop& y) {
    return x.distance_m < y.distance_m || (x.distance_m == y.distance_m && x.to < y.to);
  });
  return hops;
}

void check_task(const TopologyGraph& graph, const DeliveryTask& task) {
  auto check = [&](NodeId v, const char* which) {
    if (v >= graph.size())
      throw ContractViolation(std::string("delivery ") + which + " id out of range");
    if (!is_emt(graph.scenario().node(v).role))
      throw ContractViolation(std::string("delivery ") + which + " is not an E-MT");
    if (!graph.is_active(v)) throw ContractViolation(std::string("delivery ") + which + " inactive");
  };
  check(task.src, "src");
  check(task.dst, "dst");
  if (task.src == task.dst) throw ContractViolation("delivery src == dst");
}

DeliveryOutcome finish(RouteMethod method, std::optional<Route> route,
                       const DeliveryParams& params) {
  DeliveryOutcome out;
  out.method = method;
  out.success = route.has_value();
  if (route) out.delay_s = route_delay(*route, params);
  out.route = std::move(route);
  return out;
}

Route make_route(const TopologyGraph& graph, std::vector<NodeId> hops) {
  Route r;
  for (std::size_t i = 1; i < hops.size(); ++i)
    r.total_distance_m += graph.live_edge(hops[i - 1], hops[i], EdgeKind::Connectivity)->distance_m;
  r.hops = std::move(hops);
  return r;
}

}  // namespace

double route_delay(const Route& route, const DeliveryParams& params) {
  return route.total_distance_m / kSpeedOfLight +
         static_cast<double>(route.hop_count()) * params.hop_processing_s;
}

bool route_is_valid(const TopologyGraph& graph, const Route& route) {
  if (route.hops.size() < 2) return false;
  std::vector<NodeId> seen = route.hops;
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return false;
  double total = 0.0;
  for (std::size_t i = 1; i < route.hops.size(); ++i) {
    const Edge* e = graph.live_edge(route.hops[i - 1], route.hops[i], EdgeKind::Connectivity);
    if (e == nullptr) return false;
    if (!is_emt(graph.scenario().node(route.hops[i]).role)) return false;
    total += e->distance_m;
  }
  return total == route.total_distance_m;
}

DeliveryOutcome dijkstra_route(const TopologyGraph& graph, const DeliveryTask& task,
                               const DeliveryParams& params) {
  check_task(graph, task);

  // Label order: (distance, hops, hop sequence). Extending two labels that end
  // at the same node by the same edge preserves their order, so the usual
  // settle-once argument carries over to the full tie-break.
  struct Label {
    double dist;
    std::size_t hops;
    std::vector<NodeId> path;
    bool operator<(const Label& o) const {
      return std::tie(dist, hops, path) < std::tie(o.dist, o.hops, o.path);
    }
  };
  struct Later {
    bool operator()(const Label& a, const Label& b) const { return b < a; }
  };

  const std::size_t n = graph.size();
  std::vector<std::optional<Label>> best(n);
  std::vector<bool> settled(n, false);
  std::priority_queue<Label, std::vector<Label>, Later> open;
  best[task.src] = Label{0.0, 0, {task.src}};
  open.push(*best[task.src]);

  while (!open.empty()) {
    Label cur = open.top();
    open.pop();
    const NodeId v = cur.path.back();
    if (settled[v]) continue;
    settled[v] = true;
    if (v == task.dst) return finish(RouteMethod::TaDijkstra, make_route(graph, cur.path), params);
    for (const Hop& h : routing_neighbors(graph, v)) {
      if (settled[h.to]) continue;
      Label next{cur.dist + h.distance_m, cur.hops + 1, cur.path};
      next.path.push_back(h.to);
      if (!best[h.to] || next < *best[h.to]) {
        best[h.to] = next;
        open.push(std::move(next));
      }
    }
  }
  return finish(RouteMethod::TaDijkstra, std::nullopt, params);
}

DeliveryOutcome greedy_local_route(const TopologyGraph& graph, const DeliveryTask& task,
                                   const DeliveryParams& params) {
  check_task(graph, task);
  std::vector<bool> visited(graph.size(), false);
  std::vector<NodeId> path{task.src};
  visited[task.src] = true;
  NodeId cur = task.src;
  while (cur != task.dst) {
    std::optional<Hop> step;
    for (const Hop& h : routing_neighbors(graph, cur)) {
      if (visited[h.to]) continue;
      if (!step || h.distance_m < step->distance_m) step = h;
    }
    if (!step) return finish(RouteMethod::GreedyLocal, std::nullopt, params);
    cur = step->to;
    visited[cur] = true;
    path.push_back(cur);
  }
  return finish(RouteMethod::GreedyLocal, make_route(graph, std::move(path)), params);
}

DeliveryOutcome greedy_reachable_route(const TopologyGraph& graph, const DeliveryTask& task,
                                       const DeliveryParams& params) {
  check_task(graph, task);
  struct Frame {
    NodeId node;
    std::vector<Hop> order;
    std::size_t next = 0;
  };
  std::vector<bool> visited(graph.size(), false);
  std::vector<Frame> stack;
  visited[task.src] = true;
  stack.push_back({task.src, by_distance(routing_neighbors(graph, task.src))});

  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.node == task.dst) {
      std::vector<NodeId> path;
      path.reserve(stack.size());
      for (const Frame& f : stack) path.push_back(f.node);
      return finish(RouteMethod::GreedyReachable, make_route(graph, std::move(path)), params);
    }
    while (top.next < top.order.size() && visited[top.order[top.next].to]) ++top.next;
    if (top.next == top.order.size()) {
      stack.pop_back();  // dead end: re-select from the previous node
      continue;
    }
    const NodeId to = top.order[top.next++].to;
    visited[to] = true;
    stack.push_back({to, by_distance(routing_neighbors(graph, to))});
  }
  return finish(RouteMethod::GreedyReachable, std::nullopt, params);
}

DeliveryOutcome route_with(RouteMethod method, const TopologyGraph& graph,
                           const DeliveryTask& task, const DeliveryParams& params) {
  switch (method) {
    case RouteMethod::TaDijkstra: return dijkstra_route(graph, task, params);
    case RouteMethod::GreedyLocal: return greedy_local_route(graph, task, params);
    case RouteMethod::GreedyReachable: return greedy_reachable_route(graph, task, params);
  }
  throw ContractViolation("unknown route method");
}

DeliveryTask draw_task(const std::vector<NodeId>& emts, std::uint64_t seed, std::uint64_t trial) {
  if (emts.size() < 2) throw ContractViolation("delivery needs at least 2 active E-MTs");
  Rng rng = Rng::stream(seed, trial);
  const std::size_t i = rng.index(emts.size());
  std::size_t j = rng.index(emts.size() - 1);
  if (j >= i) ++j;
  return {emts[i], emts[j]};
}

namespace {

std::vector<NodeId> active_emts(const TopologyGraph& graph) {
  std::vector<NodeId> out;
  for (const Node& n : graph.nodes())
    if (is_emt(n.role) && graph.is_active(n.id)) out.push_back(n.id);
  return out;
}

DeliveryTrial run_trial(const TopologyGraph& graph, const std::vector<NodeId>& emts,
                        const DeliveryParams& params, std::uint64_t seed, std::uint64_t index) {
  DeliveryTrial t;
  t.index = index;
  t.task = draw_task(emts, seed, index);
  for (std::size_t m = 0; m < kRouteMethods.size(); ++m)
    t.outcomes[m] = route_with(kRouteMethods[m], graph, t.task, params);
  return t;
}

DeliveryReport aggregate(std::vector<DeliveryTrial> trials) {
  DeliveryReport report;
  std::array<std::vector<double>, 3> delays_ms;
  std::array<double, 3> hop_sums{};
  for (const DeliveryTrial& t : trials) {
    bool all = true;
    for (std::size_t m = 0; m < 3; ++m) {
      if (t.outcomes[m].success) ++report.methods[m].successes;
      all = all && t.outcomes[m].success;
    }
    if (!all) continue;
    ++report.mutually_successful;
    for (std::size_t m = 0; m < 3; ++m) {
      delays_ms[m].push_back(t.outcomes[m].delay_s * 1e3);
      hop_sums[m] += static_cast<double>(t.outcomes[m].route->hop_count());
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t m = 0; m < 3; ++m) {
    MethodAggregate& a = report.methods[m];
    a.method = kRouteMethods[m];
    a.n_trials = trials.size();
    a.success_rate = trials.empty() ? 0.0
                                    : static_cast<double>(a.successes) /
                                          static_cast<double>(trials.size());
    auto& d = delays_ms[m];
    if (d.empty()) {
      a.mean_delay_ms = a.median_delay_ms = a.mean_hops = nan;
      continue;
    }
    double sum = 0.0;
    for (double x : d) sum += x;  // trial order
    a.mean_delay_ms = sum / static_cast<double>(d.size());
    a.mean_hops = hop_sums[m] / static_cast<double>(d.size());
    std::vector<double> sorted = d;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t h = sorted.size() / 2;
    a.median_delay_ms = sorted.size() % 2 == 1 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
  }
  report.trials = std::move(trials);
  return report;
}

}  // namespace

DeliveryReport run_delivery_experiment_serial(const TopologyGraph& graph,
                                              const DeliveryParams& params, std::size_t n_trials,
                                              std::uint64_t seed) {
  if (n_trials < 1) throw ContractViolation("n_trials must be >= 1");
  const auto emts = active_emts(graph);
  if (emts.size() < 2) throw ContractViolation("delivery needs at least 2 active E-MTs");
  std::vector<DeliveryTrial> trials(n_trials);
  for (std::size_t i = 0; i < n_trials; ++i) trials[i] = run_trial(graph, emts, params, seed, i);
  return aggregate(std::move(trials));
}

DeliveryReport run_delivery_experiment(const TopologyGraph& graph, const DeliveryParams& params,
                                       std::size_t n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw ContractViolation("n_trials must be >= 1");
  const auto emts = active_emts(graph);
  if (emts.size() < 2) throw ContractViolation("delivery needs at least 2 active E-MTs");
  std::vector<DeliveryTrial> trials(n_trials);
  std::vector<std::exception_ptr> errors(n_trials);
  const auto n = static_cast<std::int64_t>(n_trials);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      trials[i] = run_trial(graph, emts, params, seed, static_cast<std::uint64_t>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return aggregate(std::move(trials));
}

DeliveryReport run_delivery_experiment(const Scenario& scenario, const ChannelParams& channel,
                                       double threshold_db, const DeliveryParams& params,
                                       std::size_t n_trials, std::uint64_t seed) {
  return run_delivery_experiment(build_graph(scenario, channel, threshold_db), params, n_trials,
                                 seed);
}

void write_delivery_csv(std::ostream& os, const DeliveryReport& report) {
  os << "method,n_trials,success_rate,mean_delay_ms,median_delay_ms,mean_hops\n";
  for (const MethodAggregate& a : report.methods)
    os << to_string(a.method) << ',' << a.n_trials << ',' << format_double(a.success_rate) << ','
       << format_double(a.mean_delay_ms) << ',' << format_double(a.median_delay_ms) << ','
       << format_double(a.mean_hops) << '\n';
}

void write_delivery_trials_jsonl(std::ostream& os, const DeliveryReport& report) {
  for (const DeliveryTrial& t : report.trials) {
    for (const DeliveryOutcome& o : t.outcomes) {
      nlohmann::json j{{"trial", t.index},
                       {"src", t.task.src},
                       {"dst", t.task.dst},
                       {"method", to_string(o.method)},
                       {"success", o.success}};
      if (o.route) {
        j["hops"] = o.route->hops;
        j["total_distance_m"] = o.route->total_distance_m;
        j["delay_s"] = o.delay_s;
      }
      os << j.dump() << '\n';
    }
  }
}

}  // namespace lawn
