#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lawn/channel.hpp"
#include "lawn/config.hpp"
#include "lawn/delivery.hpp"
#include "lawn/exttarget.hpp"
#include "lawn/harness.hpp"
#include "lawn/rng.hpp"
#include "lawn/topology.hpp"

using namespace lawn;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += " (over the " + std::to_string(static_cast<int>(budget_s)) + " s budget)";
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %d. %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Component label per node over live E-MT connectivity edges.
std::vector<int> emt_components(const TopologyGraph& g) {
  std::vector<int> label(g.size(), -1);
  int next = 0;
  for (const Node& n : g.nodes()) {
    if (!is_emt(n.role) || label[n.id] >= 0) continue;
    std::vector<NodeId> stack{n.id};
    label[n.id] = next;
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      g.for_each_live_neighbor(v, EdgeKind::Connectivity, [&](NodeId w, const Edge&) {
        if (is_emt(g.scenario().node(w).role) && label[w] < 0) {
          label[w] = next;
          stack.push_back(w);
        }
      });
    }
    ++next;
  }
  return label;
}

Outcome delivery_ordering() {
  const Scenario s = generate_scenario(ScenarioConfig{});
  const TopologyGraph g = build_graph_serial(s, {}, calibrate_threshold(s, {}, 4.0));
  const double degree = degree_stats(g).mean_degree;
  const DeliveryReport r = run_delivery_experiment_serial(g, {}, 10000, 0);
  const auto comp = emt_components(g);
  std::size_t connected = 0;
  bool delays_ok = true;
  for (const DeliveryTrial& t : r.trials) {
    connected += comp[t.task.src] == comp[t.task.dst];
    const auto& [dij, local, reach] = t.outcomes;
    if (dij.success && local.success && reach.success)
      delays_ok = delays_ok && dij.delay_s <= reach.delay_s && dij.delay_s <= local.delay_s;
  }
  const double conn = static_cast<double>(connected) / 10000.0;
  const double dij = r.methods[0].success_rate, local = r.methods[1].success_rate,
               reach = r.methods[2].success_rate;
  const bool pass = degree >= 3.0 && degree <= 8.0 && local < 0.10 && reach == dij &&
                    dij == conn && delays_ok && local < reach;
  return {pass, fmt("mean degree %.2f, success Dijkstra %.4f, GreedyLocal %.4f, "
                    "GreedyReachable %.4f",
                    degree, dij, local, reach) +
                    fmt(", connected pairs %.4f, mutual %.0f", conn,
                        static_cast<double>(r.mutually_successful)) +
                    (delays_ok ? ", delay ordering holds" : ", delay ordering violated")};
}

double exhaustive_shortest(const TopologyGraph& g, NodeId src, NodeId dst) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> on(g.size(), false);
  std::function<void(NodeId, double)> dfs = [&](NodeId v, double d) {
    if (v == dst) {
      best = std::min(best, d);
      return;
    }
    on[v] = true;
    g.for_each_live_neighbor(v, EdgeKind::Connectivity, [&](NodeId w, const Edge& e) {
      if (!on[w] && is_emt(g.scenario().node(w).role)) dfs(w, d + e.distance_m);
    });
    on[v] = false;
  };
  dfs(src, 0.0);
  return best;
}

Outcome dijkstra_oracle() {
  Rng rng(20240601);
  std::size_t pairs = 0, mismatches = 0, routed = 0;
  for (int i = 0; i < 1000; ++i) {
    ScenarioConfig c;
    c.seed = rng.next();
    c.area_x = c.area_y = 1000.0;
    const std::uint32_t n = 2 + static_cast<std::uint32_t>(rng.index(9));  // 2..10
    c.n_emt_uav = n / 2;
    c.n_emt_terrestrial = n - n / 2;
    c.n_comm_users = c.n_charging_users = c.n_sensing_targets = 0;
    const Scenario s = generate_scenario(c);
    const TopologyGraph g = build_graph(s, {}, calibrate_threshold(s, {}, rng.uniform(1.0, 4.0)));
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = 0; b < n; ++b) {
        if (a == b) continue;
        ++pairs;
        const double bf = exhaustive_shortest(g, a, b);
        const DeliveryOutcome d = dijkstra_route(g, {a, b});
        if (d.success) ++routed;
        const bool same = d.success ? d.route->total_distance_m == bf : std::isinf(bf);
        mismatches += !same;
      }
  }
  return {mismatches == 0, fmt("%.0f ordered pairs, %.0f routed, %.0f mismatches",
                               static_cast<double>(pairs), static_cast<double>(routed),
                               static_cast<double>(mismatches))};
}

Outcome selection_ordering() {
  const ExperimentSpec spec = default_spec(ExperimentCase::Selection);
  const Json j = summarize(run_experiment(spec, 0));
  const double ge_none = j["selection"]["ta_ge_none_fraction"];
  const double ge_uc = j["selection"]["ta_ge_user_centric_fraction"];
  const double se_ta = j["methods"]["TopologyAware"]["sum_se"]["mean"];
  const double se_none = j["methods"]["NoSelection"]["sum_se"]["mean"];
  const double seeds = j["selection"]["paired_seeds"];
  const bool pass = seeds == 200 && ge_none == 1.0 && ge_uc >= 0.90 && se_ta > se_none;
  return {pass, fmt("%.0f seeds, TA>=None %.3f, TA>=UC %.3f", seeds, ge_none, ge_uc) +
                    fmt(", mean sum SE TA %.3f vs None %.3f", se_ta, se_none)};
}

Outcome selection_gap() {
  ExperimentSpec spec = default_spec(ExperimentCase::Selection);
  spec.n_seeds = 100;
  spec.base_seed = 1000;
  spec.scenario.n_comm_users = 12;
  spec.selection->brute_force = true;
  const Json j = summarize(run_experiment(spec, 0));
  const double seeds = j["selection"]["brute_force_seeds"];
  const double ge = j["selection"]["brute_force_ge_ta_fraction"];
  const double gap = j["selection"]["brute_force_relative_gap"]["mean"];
  const double worst = j["selection"]["brute_force_relative_gap"]["max"];
  return {seeds == 100 && ge == 1.0,
          fmt("%.0f instances, BF>=TA %.3f, mean relative gap %.4f, max %.4f", seeds, ge, gap, worst)};
}

Outcome reflection_round_trip() {
  Rng rng(77);
  const NoiseParams none{0.0, 0.0};
  double worst_pos = 0.0, worst_range = 0.0, worst_excess = 0.0;
  int done = 0, attempts = 0, over = 0;
  while (done < 1000) {
    ++attempts;
    EllipseTarget e;
    e.center = {rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(10, 50)};
    e.semi_minor_m = rng.uniform(3, 30);
    e.semi_major_m = e.semi_minor_m * rng.uniform(1.0, 3.0);
    e.orientation_rad = rng.uniform(0, std::numbers::pi);
    auto around = [&] {
      const double r = e.semi_major_m * rng.uniform(1.2, 4.0), a = rng.uniform(0, 2 * std::numbers::pi);
      Node n;
      n.role = NodeRole::EmtUav;
      n.pos = {e.center.x + r * std::cos(a), e.center.y + r * std::sin(a), e.center.z};
      return n;
    };
    Node tx = around(), rx = around();
    rx.id = 1;
    Position3 truth;
    try {
      truth = specular_point(tx.pos, rx.pos, e);
    } catch (const std::domain_error&) {
      continue;  // forward scatter
    }
    const Measurement m = simulate_measurement(tx, rx, e, none, rng);
    const Position3 p = estimate_reflection_point(tx.pos, rx.pos, m);
    const double err = std::hypot(p.x - truth.x, p.y - truth.y);
    const double range = kSpeedOfLight * m.toa_s;
    if (err > 1e-9) {
      ++over;
      worst_excess = std::max(worst_excess, range - distance(tx.pos, rx.pos));
    }
    worst_pos = std::max(worst_pos, err);
    worst_range = std::max(worst_range, std::abs(bistatic_range(tx.pos, p, rx.pos) - range) / range);
    ++done;
  }
  std::string detail = fmt("1000 geometries (%.0f drawn), max position error %.3g m, max range "
                           "residual %.3g",
                           attempts, worst_pos, worst_range);
  if (over > 0)
    detail += fmt(", %.0f above 1e-9 m, all grazing with range - baseline <= %.3g m", over,
                  worst_excess);
  return {worst_pos <= 1e-9 && worst_range <= 1e-9, detail};
}

Outcome gp_identities() {
  Rng rng(5);
  double worst_circle = 0.0;
  for (int i = 0; i < 50; ++i) {
    GpParams gp;
    gp.lengthscale_rad = rng.uniform(0.2, 1.5);
    gp.signal_std_m = rng.uniform(1.0, 10.0);
    gp.noise_std_m = rng.uniform(0.3, 2.0);
    const double radius = rng.uniform(5, 40);
    const Position3 c{rng.uniform(-20, 20), rng.uniform(-20, 20), 0.0};
    const std::size_t n = 4 + rng.index(20);
    std::vector<Position3> circle;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = rng.uniform(0, 2 * std::numbers::pi);
      circle.push_back({c.x + radius * std::cos(t), c.y + radius * std::sin(t), 0.0});
    }
    for (double r : gp_fit_contour(circle, c, gp).radius_hat_m)
      worst_circle = std::max(worst_circle, std::abs(r - radius));
  }

  // Training sets of the default pipeline, default GP.
  const ExtTargetConfig cfg;
  double worst_ratio = 0.0;
  std::size_t points = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ExtTargetRun run = run_ext_target(cfg, seed);
    const Position3& c = run.contour.center_hat;
    std::vector<double> thetas, radii;
    for (const Position3& p : run.reflection_points) {
      thetas.push_back(std::atan2(p.y - c.y, p.x - c.x));
      radii.push_back(std::hypot(p.x - c.x, p.y - c.y));
    }
    const auto mean = gp_posterior_mean(run.reflection_points, c, cfg.gp, thetas);
    for (std::size_t k = 0; k < thetas.size(); ++k)
      worst_ratio = std::max(worst_ratio, std::abs(mean[k] - radii[k]) / cfg.gp.noise_std_m);
    points += thetas.size();
  }
  return {worst_circle <= 1e-9 && worst_ratio <= 3.0,
          fmt("circle max deviation %.3g m over 50 fits, training residual max %.3f noise_std "
              "over %.0f points",
              worst_circle, worst_ratio, static_cast<double>(points))};
}

Outcome ext_target_pipeline() {
  const ExperimentSpec spec = default_spec(ExperimentCase::ExtTarget);
  const ResultTable t = run_experiment(spec, 0);
  const auto rel = t.numeric_column("rel_mean_err");
  const auto rejected = t.numeric_column("n_rejected");
  std::size_t within = 0;
  double sum = 0.0;
  for (double v : rel) {
    within += v <= 0.10;
    sum += v;
  }
  return {rel.size() == 100 && within >= 90,
          fmt("%.0f of %.0f seeds within 10%%, mean relative error %.4f, %.0f rejected per seed",
              static_cast<double>(within), static_cast<double>(rel.size()),
              sum / static_cast<double>(rel.size()), rejected.front())};
}

Outcome channel_units() {
  const double f = ChannelParams{}.carrier_freq;
  const double at1 = fspl_db(1.0, f);
  double worst = 0.0;
  for (double d : {1.0, 3.7, 50.0, 1000.0, 12345.0})
    worst = std::max(worst, std::abs(fspl_db(2 * d, f) - fspl_db(d, f) - 20 * std::log10(2.0)));
  return {std::abs(at1 - 40.747) <= 1e-3 && std::abs(fspl_db(2.0, f) - at1 - 6.0206) <= 1e-6 &&
              worst <= 1e-9,
          fmt("fspl(1 m) %.6f dB, doubling step %.7f dB", at1, fspl_db(2.0, f) - at1)};
}

Outcome determinism() {
  std::string detail;
  bool pass = true;
  for (ExperimentCase c :
       {ExperimentCase::Selection, ExperimentCase::Delivery, ExperimentCase::ExtTarget}) {
    ExperimentSpec spec = default_spec(c);
    spec.n_seeds = std::min<std::size_t>(spec.n_seeds, 12);
    if (c == ExperimentCase::Delivery) spec.delivery->n_trials = 2000;
    auto csv = [&](std::size_t jobs) {
      std::ostringstream os;
      write_csv(os, run_experiment(spec, jobs));
      return os.str();
    };
    const std::string a = csv(1), b = csv(1), d = csv(4), e = csv(7);
    const bool same = a == b && a == d && a == e;
    pass = pass && same;
    detail += std::string(to_string(c)) + (same ? " identical" : " DIFFERS") + "; ";
  }
  return {pass, detail + "jobs 1/1/4/7"};
}

}  // namespace

int main() {
  criterion(1, "delivery ordering", 60, delivery_ordering);
  criterion(2, "dijkstra oracle equivalence", 30, dijkstra_oracle);
  criterion(3, "selection ordering", 120, selection_ordering);
  criterion(4, "selection oracle gap", 300, selection_gap);
  criterion(5, "reflection point round trip", 10, reflection_round_trip);
  criterion(6, "GP contour identities", 60, gp_identities);
  criterion(7, "extended target pipeline", 60, ext_target_pipeline);
  criterion(8, "channel unit checks", 10, channel_units);
  criterion(9, "determinism", 300, determinism);
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
