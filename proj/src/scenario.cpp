#include "lawn/scenario.hpp"

#include <array>
#include <cmath>
#include <string>

#include "lawn/errors.hpp"
#include "lawn/rng.hpp"

namespace lawn {

namespace {

constexpr std::array<std::pair<NodeRole, std::string_view>, 7> kRoleNames{{
    {NodeRole::EmtUav, "EmtUav"},
    {NodeRole::EmtTerrestrial, "EmtTerrestrial"},
    {NodeRole::Dmt, "Dmt"},
    {NodeRole::ComputingCenter, "ComputingCenter"},
    {NodeRole::CommUser, "CommUser"},
    {NodeRole::ChargingUser, "ChargingUser"},
    {NodeRole::SensingTarget, "SensingTarget"},
}};

constexpr double kChargingBatteryLo = 0.05;
constexpr double kChargingBatteryHi = 0.20;

}  // namespace

double distance(const Position3& a, const Position3& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::string_view to_string(NodeRole role) noexcept {
  for (const auto& [r, name] : kRoleNames)
    if (r == role) return name;
  return "Unknown";
}

NodeRole role_from_string(std::string_view name) {
  for (const auto& [r, n] : kRoleNames)
    if (n == name) return r;
  throw ConfigError("unknown node role '" + std::string(name) + "'");
}

void ScenarioConfig::validate() const {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(area_x) || !finite_nonneg(area_y))
    throw ConfigError("scenario area must be finite and non-negative");
  if (!finite_nonneg(alt_min) || !finite_nonneg(alt_max) || alt_min > alt_max)
    throw ConfigError("scenario altitudes must satisfy 0 <= alt_min <= alt_max");
  if (!(frac_uav_users >= 0.0 && frac_uav_users <= 1.0))
    throw ConfigError("frac_uav_users must lie in [0, 1]");
}

std::uint32_t ScenarioConfig::n_uav_users() const noexcept {
  return static_cast<std::uint32_t>(std::llround(frac_uav_users * n_comm_users));
}

Scenario::Scenario(ScenarioConfig config, std::vector<Node> nodes)
    : config_(config), nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.id != i) throw ContractViolation("scenario node ids must be dense and ordered");
    if (!std::isfinite(n.pos.x) || !std::isfinite(n.pos.y) || !std::isfinite(n.pos.z) ||
        n.pos.z < 0.0)
      throw ContractViolation("node " + std::to_string(i) + " has an invalid position");
    if (!(n.features.battery >= 0.0 && n.features.battery <= 1.0))
      throw ContractViolation("node " + std::to_string(i) + " battery outside [0, 1]");
  }
}

const Node& Scenario::node(NodeId id) const {
  if (id >= nodes_.size()) throw ContractViolation("unknown node id " + std::to_string(id));
  return nodes_[id];
}

std::vector<NodeId> Scenario::ids_with_role(NodeRole role) const {
  std::vector<NodeId> out;
  for (const Node& n : nodes_)
    if (n.role == role) out.push_back(n.id);
  return out;
}

std::vector<NodeId> Scenario::emt_ids() const {
  std::vector<NodeId> out;
  for (const Node& n : nodes_)
    if (is_emt(n.role)) out.push_back(n.id);
  return out;
}

Scenario generate_scenario(const ScenarioConfig& config) {
  config.validate();
  Rng rng(config.seed);
  std::vector<Node> nodes;
  nodes.reserve(config.n_total());

  auto add = [&](NodeRole role, bool aerial) {
    Node n;
    n.id = static_cast<NodeId>(nodes.size());
    n.role = role;
    n.aerial = aerial;
    n.pos.x = rng.uniform(0.0, config.area_x);
    n.pos.y = rng.uniform(0.0, config.area_y);
    n.pos.z = aerial ? rng.uniform(config.alt_min, config.alt_max) : 0.0;
    if (is_emt(role)) n.features.compute_capacity = 1.0;
    if (role == NodeRole::ChargingUser)
      n.features.battery = rng.uniform(kChargingBatteryLo, kChargingBatteryHi);
    nodes.push_back(n);
  };

  for (std::uint32_t i = 0; i < config.n_emt_terrestrial; ++i) add(NodeRole::EmtTerrestrial, false);
  for (std::uint32_t i = 0; i < config.n_emt_uav; ++i) add(NodeRole::EmtUav, true);
  for (std::uint32_t i = 0; i < config.n_uav_users(); ++i) add(NodeRole::CommUser, true);
  for (std::uint32_t i = 0; i < config.n_terrestrial_users(); ++i) add(NodeRole::CommUser, false);
  for (std::uint32_t i = 0; i < config.n_charging_users; ++i) add(NodeRole::ChargingUser, true);
  for (std::uint32_t i = 0; i < config.n_sensing_targets; ++i) add(NodeRole::SensingTarget, true);

  return Scenario(config, std::move(nodes));
}

Scenario reclassify_nodes(const Scenario& scenario, double battery_threshold) {
  if (!(battery_threshold > 0.0 && battery_threshold < 1.0))
    throw ContractViolation("battery_threshold must lie in (0, 1)");
  std::vector<Node> nodes(scenario.nodes().begin(), scenario.nodes().end());
  for (Node& n : nodes) {
    if (!n.aerial || n.role == NodeRole::SensingTarget) continue;
    if (n.features.battery < battery_threshold) {
      n.role = NodeRole::ChargingUser;
      n.features.task_priority = static_cast<std::uint32_t>(
          std::floor((battery_threshold - n.features.battery) / battery_threshold * 10.0));
    }
  }
  return Scenario(scenario.config(), std::move(nodes));
}

}  // namespace lawn
