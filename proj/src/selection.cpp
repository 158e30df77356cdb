#include "lawn/selection.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include <omp.h>

#include "lawn/errors.hpp"

namespace lawn {

void ObjectiveWeights::validate() const {
  if (!(w_se >= 0.0) || !(w_sens >= 0.0) || !(w_wpt >= 0.0))
    throw ConfigError("objective weights must be >= 0");
  if (w_se + w_sens + w_wpt <= 0.0) throw ConfigError("objective weights must not all be zero");
}

std::string_view to_string(SelectionMethod m) noexcept {
  switch (m) {
    case SelectionMethod::NoSelection: return "NoSelection";
    case SelectionMethod::UserCentric: return "UserCentric";
    case SelectionMethod::TopologyAware: return "TopologyAware";
    case SelectionMethod::BruteForce: return "BruteForce";
  }
  return "Unknown";
}

const EmtLoad& ServiceAssignment::load(NodeId emt) const noexcept {
  static const EmtLoad kIdle{};
  auto it = loads.find(emt);
  return it == loads.end() ? kIdle : it->second;
}

std::size_t SelectionResult::n_active_users(const TopologyGraph& graph) const {
  std::size_t n = 0;
  for (const Node& node : graph.nodes())
    if (node.role == NodeRole::CommUser && pattern[node.id]) ++n;
  return n;
}

namespace {

std::vector<NodeId> comm_users(const TopologyGraph& graph) {
  return graph.scenario().ids_with_role(NodeRole::CommUser);
}

// Highest-gain active E-MT on a live Connectivity edge; ties to the lowest id
// (neighbours are visited in ascending id, so strict > keeps the first).
std::optional<NodeId> best_emt(const TopologyGraph& graph, NodeId v) {
  std::optional<NodeId> best;
  double best_gain = -std::numeric_limits<double>::infinity();
  graph.for_each_live_neighbor(v, EdgeKind::Connectivity, [&](NodeId other, const Edge& e) {
    if (!is_emt(graph.scenario().node(other).role)) return;
    if (!best || e.weight > best_gain) {
      best = other;
      best_gain = e.weight;
    }
  });
  return best;
}

double offbeam_gain_linear(const Edge& e, const ChannelParams& params) {
  if (e.kind == EdgeKind::Interference) return db_to_linear(e.weight);
  return db_to_linear(e.weight - params.mainlobe_gain_db() + params.offbeam_gain_db());
}

ActivationPattern all_active(const TopologyGraph& graph) {
  return ActivationPattern(graph.size(), true);
}

SelectionResult evaluate(const TopologyGraph& base, ActivationPattern pattern,
                         const ChannelParams& params, const SelectionMetrics& baseline,
                         const ObjectiveWeights& weights, SelectionMethod method) {
  const TopologyGraph g = apply_activation(base, pattern);
  SelectionResult r;
  r.method = method;
  r.assignment = make_assignment(g);
  r.metrics = evaluate_metrics(g, r.assignment, params);
  r.scalar_objective = scalar_objective(r.metrics, baseline, weights);
  r.pattern = std::move(pattern);
  return r;
}

SelectionMetrics baseline_metrics(const TopologyGraph& graph, const ChannelParams& params) {
  const TopologyGraph g = apply_activation(graph, all_active(graph));
  return evaluate_metrics(g, make_assignment(g), params);
}

// Objective of the pattern with `user` switched off.
double objective_without(const TopologyGraph& graph, ActivationPattern pattern, NodeId user,
                         const ChannelParams& params, const SelectionMetrics& baseline,
                         const ObjectiveWeights& weights) {
  pattern.set(user, false);
  const TopologyGraph g = apply_activation(graph, pattern);
  return scalar_objective(evaluate_metrics(g, make_assignment(g), params), baseline, weights);
}

template <bool Parallel>
SelectionResult topology_aware_impl(const TopologyGraph& graph, const ChannelParams& params,
                                    const ObjectiveWeights& weights) {
  weights.validate();
  const SelectionMetrics baseline = baseline_metrics(graph, params);
  const std::vector<NodeId> users = comm_users(graph);

  ActivationPattern pattern = all_active(graph);
  SelectionResult current = evaluate(graph, pattern, params, baseline, weights,
                                     SelectionMethod::TopologyAware);
  std::vector<double> trace{current.scalar_objective};

  while (true) {
    std::vector<NodeId> candidates;
    for (NodeId u : users)
      if (pattern[u]) candidates.push_back(u);
    if (candidates.empty()) break;

    std::vector<double> scores(candidates.size());
    const auto n = static_cast<std::int64_t>(candidates.size());
    if constexpr (Parallel) {
      std::vector<std::exception_ptr> errors(candidates.size());
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < n; ++i) {
        try {
          scores[i] = objective_without(graph, pattern, candidates[i], params, baseline, weights);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
      for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    } else {
      for (std::int64_t i = 0; i < n; ++i)
        scores[i] = objective_without(graph, pattern, candidates[i], params, baseline, weights);
    }

    // Sequential acceptance: first strict maximum (lowest id).
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
      if (scores[i] > scores[best]) best = i;
    if (!(scores[best] > current.scalar_objective)) break;

    pattern.set(candidates[best], false);
    current = evaluate(graph, pattern, params, baseline, weights, SelectionMethod::TopologyAware);
    trace.push_back(current.scalar_objective);
  }
  current.objective_trace = std::move(trace);
  return current;
}

struct Candidate {
  double objective = -std::numeric_limits<double>::infinity();
  std::uint64_t mask = 0;
  bool valid = false;

  // Larger objective wins; equal objective -> smaller mask.
  bool better_than(const Candidate& o) const noexcept {
    if (!o.valid) return valid;
    if (!valid) return false;
    if (objective != o.objective) return objective > o.objective;
    return mask < o.mask;
  }
};

ActivationPattern pattern_for_mask(const TopologyGraph& graph, const std::vector<NodeId>& users,
                                   std::uint64_t mask) {
  ActivationPattern p = all_active(graph);
  const std::size_t k = users.size();
  // users[0] is the most significant bit so that numeric mask order equals the
  // lexicographic order of the per-user activation vector.
  for (std::size_t i = 0; i < k; ++i) p.set(users[i], ((mask >> (k - 1 - i)) & 1U) != 0);
  return p;
}

template <bool Parallel>
SelectionResult brute_force_impl(const TopologyGraph& graph, const ChannelParams& params,
                                 const ObjectiveWeights& weights, std::size_t max_users) {
  weights.validate();
  const std::vector<NodeId> users = comm_users(graph);
  if (users.size() > max_users || users.size() > 62)
    throw ContractViolation("select_brute_force: " + std::to_string(users.size()) +
                            " comm users exceed the limit of " + std::to_string(max_users));
  const SelectionMetrics baseline = baseline_metrics(graph, params);
  const auto n_patterns = static_cast<std::int64_t>(std::uint64_t{1} << users.size());

  auto score = [&](std::uint64_t mask) {
    const TopologyGraph g = apply_activation(graph, pattern_for_mask(graph, users, mask));
    return scalar_objective(evaluate_metrics(g, make_assignment(g), params), baseline, weights);
  };

  Candidate best;
  if constexpr (Parallel) {
    std::exception_ptr error;
#pragma omp parallel
    {
      Candidate local;
#pragma omp for schedule(static)
      for (std::int64_t m = 0; m < n_patterns; ++m) {
        try {
          Candidate c{score(static_cast<std::uint64_t>(m)), static_cast<std::uint64_t>(m), true};
          if (c.better_than(local)) local = c;
        } catch (...) {
#pragma omp critical(lawn_bf_error)
          if (!error) error = std::current_exception();
        }
      }
#pragma omp critical(lawn_bf_reduce)
      if (local.better_than(best)) best = local;
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (std::int64_t m = 0; m < n_patterns; ++m) {
      Candidate c{score(static_cast<std::uint64_t>(m)), static_cast<std::uint64_t>(m), true};
      if (c.better_than(best)) best = c;
    }
  }
  return evaluate(graph, pattern_for_mask(graph, users, best.mask), params, baseline, weights,
                  SelectionMethod::BruteForce);
}

}  // namespace

ServiceAssignment make_assignment(const TopologyGraph& graph, const ActivationPattern& pattern) {
  return make_assignment(apply_activation(graph, pattern));
}

ServiceAssignment make_assignment(const TopologyGraph& graph) {
  ServiceAssignment a;
  const Scenario& sc = graph.scenario();

  for (const Node& n : sc.nodes()) {
    if (!graph.is_active(n.id)) continue;
    if (n.role == NodeRole::CommUser) {
      if (auto e = best_emt(graph, n.id)) {
        a.serving.emplace(n.id, *e);
        ++a.loads[*e].comm_users;
      }
    } else if (n.role == NodeRole::ChargingUser) {
      std::vector<NodeId> sources;
      graph.for_each_live_neighbor(n.id, EdgeKind::Connectivity, [&](NodeId other, const Edge&) {
        if (is_emt(sc.node(other).role)) sources.push_back(other);
      });
      for (NodeId e : sources) ++a.loads[e].wpt_users;
      a.wpt_sources.emplace(n.id, std::move(sources));
    } else if (n.role == NodeRole::SensingTarget && !a.sensing_target) {
      a.sensing_target = n.id;
      a.sensing_tx = best_emt(graph, n.id);
      if (a.sensing_tx) {
        a.loads[*a.sensing_tx].sensing = true;
        graph.for_each_live_neighbor(n.id, EdgeKind::Connectivity, [&](NodeId other, const Edge&) {
          if (is_emt(sc.node(other).role) && other != *a.sensing_tx) a.sensing_rx.push_back(other);
        });
      }
    }
  }
  for (const auto& [emt, load] : a.loads) a.power_split.emplace(emt, load.share_fraction());
  return a;
}

std::map<NodeId, double> user_sinr(const TopologyGraph& graph, const ServiceAssignment& assignment,
                                   const ChannelParams& params) {
  const double p_tx = params.tx_power_w();
  const double noise = params.noise_w();
  const Scenario& sc = graph.scenario();
  std::map<NodeId, double> out;
  for (const auto& [user, serving] : assignment.serving) {
    const Edge* link = graph.live_edge(user, serving, EdgeKind::Connectivity);
    if (link == nullptr)
      throw ContractViolation("serving pair " + std::to_string(user) + "-" +
                              std::to_string(serving) + " is not a live edge");
    const EmtLoad& own = assignment.load(serving);
    const double signal = p_tx * own.share_fraction() * db_to_linear(link->weight);

    double interference = 0.0;
    auto add_interferer = [&](NodeId emt, const Edge& e) {
      if (!is_emt(sc.node(emt).role)) return;
      const EmtLoad& load = assignment.load(emt);
      std::size_t shares = load.interfering_shares();
      if (emt == serving) shares -= 1;  // its own beam is the signal
      interference +=
          p_tx * load.share_fraction() * static_cast<double>(shares) * offbeam_gain_linear(e, params);
    };
    graph.for_each_live_neighbor(user, EdgeKind::Connectivity, add_interferer);
    graph.for_each_live_neighbor(user, EdgeKind::Interference, add_interferer);
    out.emplace(user, signal / (noise + interference));
  }
  return out;
}

double sum_spectral_efficiency(const TopologyGraph& graph, const ServiceAssignment& assignment,
                               const ChannelParams& params) {
  double total = 0.0;
  for (const auto& [user, sinr] : user_sinr(graph, assignment, params)) total += std::log2(1.0 + sinr);
  return total;
}

SensingSinr sensing_sinr(const TopologyGraph& graph, const ServiceAssignment& assignment,
                         const ChannelParams& params) {
  SensingSinr out;
  if (!assignment.sensing_target || !assignment.sensing_tx || assignment.sensing_rx.empty())
    return out;
  const Scenario& sc = graph.scenario();
  const Node& target = sc.node(*assignment.sensing_target);
  const Node& tx = sc.node(*assignment.sensing_tx);
  const double p_tx = params.tx_power_w();
  const double noise = params.noise_w();
  const double sensing_power = p_tx * assignment.load(tx.id).share_fraction();

  double best_linear = -1.0;
  for (NodeId rx_id : assignment.sensing_rx) {
    const Node& rx = sc.node(rx_id);
    const double echo = sensing_power * db_to_linear(echo_gain_db(tx, target, rx, params));
    double interference = 0.0;
    for (const auto& [emt, load] : assignment.loads) {
      if (emt == rx_id || load.comm_users == 0 || !graph.is_active(emt)) continue;
      if (!graph.live_edge(emt, rx_id, EdgeKind::Connectivity) &&
          !graph.live_edge(emt, rx_id, EdgeKind::Interference))
        continue;
      const double g = db_to_linear(link_gain(sc.node(emt), rx, params, false).gain_db);
      interference += p_tx * load.share_fraction() * static_cast<double>(load.comm_users) * g;
    }
    const double sinr = echo / (noise + interference);
    if (sinr > best_linear) {
      best_linear = sinr;
      out.best_rx = rx_id;
    }
  }
  out.outage = false;
  out.sinr_db = linear_to_db(best_linear);
  return out;
}

double wpt_energy(const TopologyGraph& graph, const ServiceAssignment& assignment,
                  const ChannelParams& params) {
  const double p_tx = params.tx_power_w();
  double received_w = 0.0;
  for (const auto& [user, sources] : assignment.wpt_sources) {
    for (NodeId emt : sources) {
      const Edge* e = graph.live_edge(user, emt, EdgeKind::Connectivity);
      if (e == nullptr) continue;
      received_w += p_tx * assignment.load(emt).share_fraction() * db_to_linear(e->weight);
    }
  }
  return params.wpt_efficiency * received_w * params.slot_duration_s;
}

SelectionMetrics evaluate_metrics(const TopologyGraph& graph, const ServiceAssignment& assignment,
                                  const ChannelParams& params) {
  SelectionMetrics m;
  m.sum_se = sum_spectral_efficiency(graph, assignment, params);
  const SensingSinr s = sensing_sinr(graph, assignment, params);
  m.sensing_sinr_db = s.sinr_db;
  m.sensing_outage = s.outage;
  m.wpt_energy_j = wpt_energy(graph, assignment, params);
  return m;
}

double scalar_objective(const SelectionMetrics& metrics, const SelectionMetrics& baseline,
                        const ObjectiveWeights& weights) {
  auto ratio = [](double x, double x0) { return x0 > 0.0 ? x / x0 : x; };
  auto sens_linear = [](const SelectionMetrics& m) {
    return m.sensing_outage ? 0.0 : db_to_linear(m.sensing_sinr_db);
  };
  return weights.w_se * ratio(metrics.sum_se, baseline.sum_se) +
         weights.w_sens * ratio(sens_linear(metrics), sens_linear(baseline)) +
         weights.w_wpt * ratio(metrics.wpt_energy_j, baseline.wpt_energy_j);
}

SelectionResult select_none(const TopologyGraph& graph, const ChannelParams& params,
                            const ObjectiveWeights& weights) {
  weights.validate();
  const SelectionMetrics baseline = baseline_metrics(graph, params);
  return evaluate(graph, all_active(graph), params, baseline, weights,
                  SelectionMethod::NoSelection);
}

SelectionResult select_user_centric(const TopologyGraph& graph, const ChannelParams& params,
                                    const ObjectiveWeights& weights, const SelectionParams& sel) {
  weights.validate();
  const SelectionMetrics baseline = baseline_metrics(graph, params);
  const TopologyGraph full = apply_activation(graph, all_active(graph));
  ActivationPattern pattern = all_active(graph);
  for (NodeId u : comm_users(graph)) {
    double snr_db = -std::numeric_limits<double>::infinity();
    if (auto e = best_emt(full, u)) {
      const Edge* link = full.live_edge(u, *e, EdgeKind::Connectivity);
      snr_db = params.tx_power_dbm + link->weight - params.noise_dbm;
    }
    pattern.set(u, snr_db >= sel.qos_floor_db);
  }
  return evaluate(graph, std::move(pattern), params, baseline, weights,
                  SelectionMethod::UserCentric);
}

SelectionResult select_topology_aware(const TopologyGraph& graph, const ChannelParams& params,
                                      const ObjectiveWeights& weights) {
  return topology_aware_impl<true>(graph, params, weights);
}

SelectionResult select_topology_aware_serial(const TopologyGraph& graph,
                                             const ChannelParams& params,
                                             const ObjectiveWeights& weights) {
  return topology_aware_impl<false>(graph, params, weights);
}

SelectionResult select_brute_force(const TopologyGraph& graph, const ChannelParams& params,
                                   const ObjectiveWeights& weights, std::size_t max_users) {
  return brute_force_impl<true>(graph, params, weights, max_users);
}

SelectionResult select_brute_force_serial(const TopologyGraph& graph, const ChannelParams& params,
                                          const ObjectiveWeights& weights,
                                          std::size_t max_users) {
  return brute_force_impl<false>(graph, params, weights, max_users);
}

}  // namespace lawn
