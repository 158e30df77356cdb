#pragma once

#include <vector>

#include "lawn/scenario.hpp"
#include "lawn/topology.hpp"

namespace lawn::test {

inline Node node(NodeId id, NodeRole role, double x, double y, double z = 0.0) {
  Node n;
  n.id = id;
  n.role = role;
  n.pos = {x, y, z};
  n.aerial = z > 0.0;
  if (is_emt(role)) n.features.compute_capacity = 1.0;
  return n;
}

/// Scenario from explicit nodes, ids assigned in order.
inline Scenario scenario_of(std::vector<Node> nodes) {
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].id = static_cast<NodeId>(i);
  return Scenario(ScenarioConfig{}, std::move(nodes));
}

inline Node emt(double x, double y, double z = 0.0) {
  return node(0, NodeRole::EmtTerrestrial, x, y, z);
}
inline Node user(double x, double y, double z = 0.0) { return node(0, NodeRole::CommUser, x, y, z); }
inline Node charger(double x, double y, double z = 20.0) {
  return node(0, NodeRole::ChargingUser, x, y, z);
}
inline Node target(double x, double y, double z = 20.0) {
  return node(0, NodeRole::SensingTarget, x, y, z);
}

}  // namespace lawn::test
