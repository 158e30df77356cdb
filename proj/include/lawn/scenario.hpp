#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace lawn {

using NodeId = std::uint32_t;

struct Position3 {
  double x = 0.0;  // m
  double y = 0.0;  // m
  double z = 0.0;  // m

  friend bool operator==(const Position3&, const Position3&) = default;
};

double distance(const Position3& a, const Position3& b) noexcept;

enum class NodeRole {
  EmtUav,
  EmtTerrestrial,
  Dmt,
  ComputingCenter,
  CommUser,
  ChargingUser,
  SensingTarget,
};

std::string_view to_string(NodeRole role) noexcept;
/// Throws ConfigError on unknown names.
NodeRole role_from_string(std::string_view name);

constexpr bool is_emt(NodeRole r) noexcept {
  return r == NodeRole::EmtUav || r == NodeRole::EmtTerrestrial;
}

struct NodeFeatures {
  double battery = 1.0;           // fraction in [0, 1]
  double compute_capacity = 0.0;  // abstract work units
  std::uint32_t task_priority = 0;
  bool active = true;

  friend bool operator==(const NodeFeatures&, const NodeFeatures&) = default;
};

struct Node {
  NodeId id = 0;
  NodeRole role = NodeRole::CommUser;
  Position3 pos;
  NodeFeatures features;
  /// UAV-borne node. Roles alone do not say this for users.
  bool aerial = false;

  friend bool operator==(const Node&, const Node&) = default;
};

struct ScenarioConfig {
  double area_x = 2000.0;
  double area_y = 2000.0;
  double alt_min = 10.0;
  double alt_max = 50.0;
  std::uint32_t n_emt_uav = 64;
  std::uint32_t n_emt_terrestrial = 64;
  std::uint32_t n_comm_users = 20;
  double frac_uav_users = 0.8;
  std::uint32_t n_charging_users = 4;
  std::uint32_t n_sensing_targets = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError when an invariant is broken.
  void validate() const;

  std::uint32_t n_uav_users() const noexcept;
  std::uint32_t n_terrestrial_users() const noexcept { return n_comm_users - n_uav_users(); }
  std::uint32_t n_emt() const noexcept { return n_emt_uav + n_emt_terrestrial; }
  std::uint32_t n_total() const noexcept {
    return n_emt() + n_comm_users + n_charging_users + n_sensing_targets;
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Immutable deployment. Node ids are dense 0..N-1 and equal to the index.
class Scenario {
 public:
  /// Validates config and node invariants; throws ContractViolation.
  Scenario(ScenarioConfig config, std::vector<Node> nodes);

  const ScenarioConfig& config() const noexcept { return config_; }
  std::span<const Node> nodes() const noexcept { return nodes_; }
  const Node& node(NodeId id) const;
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  std::vector<NodeId> ids_with_role(NodeRole role) const;
  std::vector<NodeId> emt_ids() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;

 private:
  ScenarioConfig config_;
  std::vector<Node> nodes_;
};

/// Uniform random deployment. Id order: terrestrial E-MTs, UAV E-MTs, UAV comm
/// users, terrestrial comm users, charging users (UAV), sensing targets (UAV).
/// Draw order per node in id order: x, y, then z (aerial only), then battery
/// (charging users only).
Scenario generate_scenario(const ScenarioConfig& config);

/// Aerial nodes (other than sensing targets) whose battery is strictly below
/// the threshold become ChargingUser with priority
/// floor((threshold - battery) / threshold * 10).
Scenario reclassify_nodes(const Scenario& scenario, double battery_threshold);

}  // namespace lawn
