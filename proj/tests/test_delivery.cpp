#include "doctest.h"
#include "lawn/channel.hpp"
#include "lawn/delivery.hpp"
#include "lawn/errors.hpp"
#include "support.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

using namespace lawn;
using test::emt;
using test::user;

namespace {

// Terrestrial E-MTs are linked up to ~580 m at -90 dB.
constexpr double kThr = -90.0;

TopologyGraph line_graph(std::vector<Node> nodes) {
  return build_graph(test::scenario_of(std::move(nodes)), {}, kThr);
}

Scenario random_small(std::uint64_t seed, std::uint32_t n_emt) {
  ScenarioConfig c;
  c.seed = seed;
  c.area_x = c.area_y = 1500;
  c.n_emt_uav = n_emt / 2;
  c.n_emt_terrestrial = n_emt - n_emt / 2;
  c.n_comm_users = 2;
  c.n_charging_users = 0;
  c.n_sensing_targets = 0;
  return generate_scenario(c);
}

// Shortest simple-path distance by exhaustive enumeration.
double brute_force_shortest(const TopologyGraph& g, NodeId src, NodeId dst) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> on_path(g.size(), false);
  std::function<void(NodeId, double)> dfs = [&](NodeId v, double d) {
    if (v == dst) {
      best = std::min(best, d);
      return;
    }
    on_path[v] = true;
    g.for_each_live_neighbor(v, EdgeKind::Connectivity, [&](NodeId w, const Edge& e) {
      if (!on_path[w] && is_emt(g.scenario().node(w).role)) dfs(w, d + e.distance_m);
    });
    on_path[v] = false;
  };
  dfs(src, 0.0);
  return best;
}

void check_same(const DeliveryOutcome& a, const DeliveryOutcome& b) {
  CHECK(a.method == b.method);
  CHECK(a.success == b.success);
  CHECK(a.route.has_value() == b.route.has_value());
  if (a.route && b.route) {
    CHECK(a.route->hops == b.route->hops);
    CHECK(a.route->total_distance_m == b.route->total_distance_m);
  }
  CHECK(a.delay_s == b.delay_s);
}

}  // namespace

TEST_CASE("route delay") {
  Route r;
  r.hops = {0, 1, 2, 3};
  r.total_distance_m = 1500.0;
  // 1500 m / c + 3 hops * 1 ms
  CHECK(route_delay(r, {}) == doctest::Approx(0.0030050034614279722).epsilon(1e-14));
  Route a{{0, 1}, 400.0}, b{{1, 2}, 700.0}, ab{{0, 1, 2}, 1100.0};
  CHECK(route_delay(ab, {}) == doctest::Approx(route_delay(a, {}) + route_delay(b, {})));
  CHECK(route_delay(r, {0.0}) == doctest::Approx(1500.0 / kSpeedOfLight));
}

TEST_CASE("two-hop relay") {
  // A - B - C with A-C out of range.
  const TopologyGraph g = line_graph({emt(0, 0), emt(400, 0), emt(800, 0)});
  REQUIRE(g.live_edge(0, 2, EdgeKind::Connectivity) == nullptr);
  for (RouteMethod m : kRouteMethods) {
    const DeliveryOutcome o = route_with(m, g, {0, 2});
    REQUIRE(o.success);
    CHECK(o.method == m);
    CHECK(o.route->hops == std::vector<NodeId>{0, 1, 2});
    CHECK(o.route->hop_count() == 2);
    CHECK(o.route->total_distance_m == 800.0);
    CHECK(route_is_valid(g, *o.route));
    CHECK(o.delay_s == doctest::Approx(800.0 / kSpeedOfLight + 2e-3));
  }
}

TEST_CASE("direct neighbours take one hop") {
  const TopologyGraph g = line_graph({emt(0, 0), emt(300, 0)});
  for (RouteMethod m : kRouteMethods) {
    const DeliveryOutcome o = route_with(m, g, {1, 0});
    REQUIRE(o.success);
    CHECK(o.route->hops == std::vector<NodeId>{1, 0});
  }
}

TEST_CASE("disconnected destination fails for every method") {
  const TopologyGraph g = line_graph({emt(0, 0), emt(300, 0), emt(5000, 0)});
  for (RouteMethod m : kRouteMethods) {
    const DeliveryOutcome o = route_with(m, g, {0, 2});
    CHECK(!o.success);
    CHECK(!o.route.has_value());
  }
}

TEST_CASE("users are never relays") {
  // E-MTs 0 and 2 are only joined through a user.
  const TopologyGraph g = line_graph({emt(0, 0), user(400, 0), emt(800, 0)});
  REQUIRE(g.live_edge(0, 1, EdgeKind::Connectivity) != nullptr);
  for (RouteMethod m : kRouteMethods) CHECK(!route_with(m, g, {0, 2}).success);
}

TEST_CASE("greedy dead end") {
  // Nearest neighbour of S is the dead end X; S - M - D is the only path.
  const TopologyGraph g =
      line_graph({emt(0, 0), emt(-100, 0), emt(500, 0), emt(1000, 0)});
  const DeliveryTask t{0, 3};
  const DeliveryOutcome local = greedy_local_route(g, t);
  const DeliveryOutcome dij = dijkstra_route(g, t);
  const DeliveryOutcome reach = greedy_reachable_route(g, t);
  CHECK(!local.success);
  REQUIRE(dij.success);
  REQUIRE(reach.success);
  CHECK(dij.route->hops == std::vector<NodeId>{0, 2, 3});
  CHECK(reach.route->hops == std::vector<NodeId>{0, 2, 3});
  CHECK(reach.delay_s >= dij.delay_s);
}

TEST_CASE("greedy reachable can be longer than the shortest path") {
  // From S the nearest neighbour A leads around; the direct relay B is shorter.
  const TopologyGraph g = line_graph(
      {emt(0, 0), emt(0, 150), emt(450, 300), emt(520, 0), emt(1000, 0)});
  const DeliveryTask t{0, 4};
  const DeliveryOutcome dij = dijkstra_route(g, t);
  const DeliveryOutcome reach = greedy_reachable_route(g, t);
  REQUIRE(dij.success);
  REQUIRE(reach.success);
  CHECK(reach.route->total_distance_m > dij.route->total_distance_m);
  CHECK(route_is_valid(g, *reach.route));
}

TEST_CASE("inactive E-MTs are skipped") {
  const TopologyGraph full = line_graph({emt(0, 0), emt(400, 0), emt(800, 0), emt(400, 300)});
  ActivationPattern p(full.size());
  p.set(1, false);
  const TopologyGraph g = apply_activation(full, p);
  const DeliveryOutcome o = dijkstra_route(g, {0, 2});
  REQUIRE(o.success);
  CHECK(o.route->hops == std::vector<NodeId>{0, 3, 2});
  CHECK_THROWS_AS(dijkstra_route(g, {1, 2}), ContractViolation);
}

TEST_CASE("contract violations") {
  const TopologyGraph g = line_graph({emt(0, 0), emt(300, 0), user(100, 0)});
  for (RouteMethod m : kRouteMethods) {
    CHECK_THROWS_AS(route_with(m, g, {0, 0}), ContractViolation);
    CHECK_THROWS_AS(route_with(m, g, {0, 2}), ContractViolation);
    CHECK_THROWS_AS(route_with(m, g, {0, 9}), ContractViolation);
  }
  CHECK_THROWS_AS(draw_task({3}, 0, 0), ContractViolation);
  CHECK_THROWS_AS(run_delivery_experiment(g, {}, 0, 0), ContractViolation);
}

TEST_CASE("route validity checker") {
  const TopologyGraph g = line_graph({emt(0, 0), emt(400, 0), emt(800, 0)});
  CHECK(route_is_valid(g, Route{{0, 1, 2}, 800.0}));
  CHECK(!route_is_valid(g, Route{{0, 2}, 800.0}));
  CHECK(!route_is_valid(g, Route{{0, 1, 2}, 801.0}));
  CHECK(!route_is_valid(g, Route{{0, 1, 0, 1}, 1200.0}));
  CHECK(!route_is_valid(g, Route{{0}, 0.0}));
}

TEST_CASE("dijkstra matches exhaustive search on small graphs") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Scenario s = random_small(seed, 3 + seed % 6);
    const TopologyGraph g = build_graph(s, {}, calibrate_threshold(s, {}, 3.0));
    std::vector<NodeId> emts;
    for (const Node& n : s.nodes())
      if (is_emt(n.role)) emts.push_back(n.id);
    for (NodeId a : emts)
      for (NodeId b : emts) {
        if (a == b) continue;
        const double bf = brute_force_shortest(g, a, b);
        const DeliveryOutcome d = dijkstra_route(g, {a, b});
        CHECK(d.success == std::isfinite(bf));
        if (!d.success) continue;
        CHECK(d.route->total_distance_m == doctest::Approx(bf).epsilon(1e-12));
        CHECK(route_is_valid(g, *d.route));
      }
  }
}

TEST_CASE("method ordering invariants on random graphs") {
  const Scenario s = generate_scenario(ScenarioConfig{});
  const TopologyGraph g = build_graph(s, {}, calibrate_threshold(s, {}, 4.0));
  const DeliveryReport r = run_delivery_experiment(g, {}, 2000, 7);
  for (const DeliveryTrial& t : r.trials) {
    const auto& [dij, local, reach] = t.outcomes;
    CHECK(dij.success == reach.success);
    if (local.success) CHECK(dij.success);
    for (const DeliveryOutcome* o : {&dij, &local, &reach}) {
      if (!o->success) continue;
      CHECK(route_is_valid(g, *o->route));
      CHECK(o->route->hops.front() == t.task.src);
      CHECK(o->route->hops.back() == t.task.dst);
      CHECK(o->route->total_distance_m >= dij.route->total_distance_m - 1e-9);
    }
  }
  const auto& m = r.methods;
  CHECK(m[0].success_rate >= m[1].success_rate);
  CHECK(m[0].success_rate == m[2].success_rate);
  CHECK(m[0].mean_delay_ms <= m[1].mean_delay_ms);
  CHECK(m[0].mean_delay_ms <= m[2].mean_delay_ms);
}

TEST_CASE("parallel experiment equals the serial reference") {
  const Scenario s = generate_scenario(ScenarioConfig{});
  const TopologyGraph g = build_graph(s, {}, calibrate_threshold(s, {}, 4.0));
  const DeliveryReport par = run_delivery_experiment(g, {}, 1500, 3);
  const DeliveryReport ser = run_delivery_experiment_serial(g, {}, 1500, 3);
  REQUIRE(par.trials.size() == ser.trials.size());
  CHECK(par.mutually_successful == ser.mutually_successful);
  for (std::size_t i = 0; i < par.trials.size(); ++i) {
    CHECK(par.trials[i].task.src == ser.trials[i].task.src);
    CHECK(par.trials[i].task.dst == ser.trials[i].task.dst);
    for (std::size_t m = 0; m < 3; ++m) check_same(par.trials[i].outcomes[m], ser.trials[i].outcomes[m]);
  }
  for (std::size_t m = 0; m < 3; ++m) {
    CHECK(par.methods[m].successes == ser.methods[m].successes);
    CHECK(par.methods[m].mean_delay_ms == ser.methods[m].mean_delay_ms);
    CHECK(par.methods[m].median_delay_ms == ser.methods[m].median_delay_ms);
    CHECK(par.methods[m].mean_hops == ser.methods[m].mean_hops);
  }
  std::ostringstream a, b;
  write_delivery_csv(a, par);
  write_delivery_csv(b, ser);
  CHECK(a.str() == b.str());
}

TEST_CASE("task draws") {
  const std::vector<NodeId> emts{2, 5, 9, 11};
  std::array<int, 4> src_count{};
  for (std::uint64_t t = 0; t < 4000; ++t) {
    const DeliveryTask task = draw_task(emts, 1, t);
    CHECK(task.src != task.dst);
    const DeliveryTask again = draw_task(emts, 1, t);
    CHECK(task.src == again.src);
    CHECK(task.dst == again.dst);
    for (std::size_t i = 0; i < emts.size(); ++i)
      if (emts[i] == task.src) ++src_count[i];
  }
  for (int c : src_count) CHECK(std::abs(c - 1000) < 150);
}

TEST_CASE("no mutually successful trial gives NaN delays") {
  const TopologyGraph g = line_graph({emt(0, 0), emt(5000, 0)});
  const DeliveryReport r = run_delivery_experiment(g, {}, 10, 0);
  for (const MethodAggregate& m : r.methods) {
    CHECK(m.success_rate == 0.0);
    CHECK(std::isnan(m.mean_delay_ms));
  }
  CHECK(r.mutually_successful == 0);
}

TEST_CASE("csv output") {
  const TopologyGraph g = line_graph({emt(0, 0), emt(400, 0), emt(800, 0)});
  const DeliveryReport r = run_delivery_experiment(g, {}, 20, 0);
  std::ostringstream os;
  write_delivery_csv(os, r);
  const std::string csv = os.str();
  CHECK(csv.rfind("method,n_trials,success_rate,mean_delay_ms,median_delay_ms,mean_hops\n", 0) == 0);
  CHECK(csv.find("TaDijkstra,20,1") != std::string::npos);
  std::ostringstream js;
  write_delivery_trials_jsonl(js, r);
  std::size_t lines = 0;
  for (char c : js.str()) lines += c == '\n';
  CHECK(lines == 60);
}
