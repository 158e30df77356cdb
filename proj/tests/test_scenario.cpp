#include "doctest.h"
#include "lawn/errors.hpp"
#include "lawn/scenario.hpp"
#include "support.hpp"

#include <map>

using namespace lawn;

namespace {

std::map<NodeRole, int> tally(const Scenario& s) {
  std::map<NodeRole, int> t;
  for (const Node& n : s.nodes()) ++t[n.role];
  return t;
}

}  // namespace

TEST_CASE("default config role counts") {
  ScenarioConfig c;
  c.n_comm_users = 20;
  const Scenario s = generate_scenario(c);
  auto t = tally(s);
  CHECK(t[NodeRole::EmtTerrestrial] == 64);
  CHECK(t[NodeRole::EmtUav] == 64);
  CHECK(t[NodeRole::CommUser] == 20);
  CHECK(t[NodeRole::ChargingUser] == 4);
  CHECK(t[NodeRole::SensingTarget] == 1);
  int uav_users = 0;
  for (const Node& n : s.nodes())
    if (n.role == NodeRole::CommUser && n.aerial) ++uav_users;
  CHECK(uav_users == 16);
  CHECK(s.size() == 153);
}

TEST_CASE("id ordering") {
  const Scenario s = generate_scenario(ScenarioConfig{});
  auto rank = [](const Node& n) {
    if (n.role == NodeRole::EmtTerrestrial) return 0;
    if (n.role == NodeRole::EmtUav) return 1;
    if (n.role == NodeRole::CommUser) return n.aerial ? 2 : 3;
    if (n.role == NodeRole::ChargingUser) return 4;
    return 5;
  };
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(rank(s.nodes()[i - 1]) <= rank(s.nodes()[i]));
}

TEST_CASE("empty user set") {
  ScenarioConfig c;
  c.n_comm_users = 0;
  c.n_charging_users = 0;
  c.n_sensing_targets = 0;
  const Scenario s = generate_scenario(c);
  CHECK(s.size() == 128);
  for (const Node& n : s.nodes()) CHECK(is_emt(n.role));
}

TEST_CASE("determinism and seed sensitivity") {
  ScenarioConfig c;
  c.seed = 17;
  CHECK(generate_scenario(c) == generate_scenario(c));
  ScenarioConfig d = c;
  d.seed = 18;
  const Scenario a = generate_scenario(c), b = generate_scenario(d);
  CHECK(tally(a) == tally(b));
  bool moved = false;
  for (std::size_t i = 0; i < a.size(); ++i) moved |= !(a.nodes()[i].pos == b.nodes()[i].pos);
  CHECK(moved);
}

TEST_CASE("positions inside the box") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ScenarioConfig c;
    c.seed = seed;
    c.area_x = 300;
    c.area_y = 700;
    for (const Node& n : generate_scenario(c).nodes()) {
      CHECK(n.pos.x >= 0.0);
      CHECK(n.pos.x <= 300.0);
      CHECK(n.pos.y >= 0.0);
      CHECK(n.pos.y <= 700.0);
      if (n.aerial) {
        CHECK(n.pos.z >= c.alt_min);
        CHECK(n.pos.z <= c.alt_max);
      } else {
        CHECK(n.pos.z == 0.0);
      }
      if (n.role == NodeRole::ChargingUser) {
        CHECK(n.features.battery >= 0.05);
        CHECK(n.features.battery <= 0.20);
      } else {
        CHECK(n.features.battery == 1.0);
      }
      CHECK(n.features.active);
      CHECK(n.features.task_priority == 0);
    }
  }
}

TEST_CASE("invalid configs are rejected") {
  ScenarioConfig c;
  c.alt_min = 60;
  CHECK_THROWS_AS(generate_scenario(c), ConfigError);
  c = {};
  c.frac_uav_users = 1.5;
  CHECK_THROWS_AS(generate_scenario(c), ConfigError);
  c = {};
  c.area_x = -1;
  CHECK_THROWS_AS(generate_scenario(c), ConfigError);
}

TEST_CASE("reclassify_nodes") {
  auto uav = [](double battery) {
    Node n = test::node(0, NodeRole::CommUser, 0, 0, 20);
    n.features.battery = battery;
    return n;
  };
  Node e = test::emt(10, 10);
  e.features.battery = 0.01;  // terrestrial, never reclassified
  const Scenario s = test::scenario_of({e, uav(0.10), uav(0.95), uav(0.20)});
  const Scenario r = reclassify_nodes(s, 0.20);
  CHECK(r.node(0).role == NodeRole::EmtTerrestrial);
  CHECK(r.node(1).role == NodeRole::ChargingUser);
  CHECK(r.node(1).features.task_priority == 5);
  CHECK(r.node(2).role == NodeRole::CommUser);
  CHECK(r.node(3).role == NodeRole::CommUser);  // strict inequality
  CHECK(reclassify_nodes(r, 0.20) == r);
}

TEST_CASE("reclassify is idempotent on generated scenarios") {
  ScenarioConfig c;
  c.n_comm_users = 50;
  const Scenario s = reclassify_nodes(generate_scenario(c), 0.5);
  CHECK(reclassify_nodes(s, 0.5) == s);
}

TEST_CASE("role names round trip") {
  for (NodeRole r : {NodeRole::EmtUav, NodeRole::EmtTerrestrial, NodeRole::Dmt,
                     NodeRole::ComputingCenter, NodeRole::CommUser, NodeRole::ChargingUser,
                     NodeRole::SensingTarget})
    CHECK(role_from_string(to_string(r)) == r);
  CHECK_THROWS_AS(role_from_string("Nope"), ConfigError);
}
