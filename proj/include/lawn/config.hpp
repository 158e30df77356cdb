#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "lawn/channel.hpp"
#include "lawn/delivery.hpp"
#include "lawn/exttarget.hpp"
#include "lawn/scenario.hpp"
#include "lawn/selection.hpp"
#include "lawn/topology.hpp"

namespace lawn {

using Json = nlohmann::json;

enum class ExperimentCase { Selection, Delivery, ExtTarget };
std::string_view to_string(ExperimentCase c) noexcept;
/// "selection" | "delivery" | "ext_target"; throws ConfigError otherwise.
ExperimentCase case_from_string(std::string_view name);

struct SelectionBlock {
  ObjectiveWeights weights;
  SelectionParams params;
  bool brute_force = false;  // adds a BruteForce row per seed

  friend bool operator==(const SelectionBlock&, const SelectionBlock&) = default;
};

struct DeliveryBlock {
  std::size_t n_trials = 10000;
  DeliveryParams params;

  friend bool operator==(const DeliveryBlock&, const DeliveryBlock&) = default;
};

/// One experiment document. Selection and Delivery need exactly one of
/// threshold_db / target_mean_degree; the scenario seed of run i is
/// base_seed + i.
struct ExperimentSpec {
  ExperimentCase kind = ExperimentCase::Selection;
  ScenarioConfig scenario;
  ChannelParams channel;
  std::optional<double> threshold_db;
  std::optional<double> target_mean_degree;
  std::size_t n_seeds = 1;
  std::uint64_t base_seed = 0;
  std::optional<SelectionBlock> selection;
  std::optional<DeliveryBlock> delivery;
  std::optional<ExtTargetConfig> ext_target;

  void validate() const;  // throws ConfigError

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

// Strict readers: unknown keys, wrong types and out-of-range values raise
// ConfigError naming the offending path.
ScenarioConfig scenario_config_from_json(const Json& j);
Json to_json(const ScenarioConfig& c, bool include_seed = true);
ChannelParams channel_params_from_json(const Json& j);
Json to_json(const ChannelParams& p);
ObjectiveWeights weights_from_json(const Json& j);
Json to_json(const ObjectiveWeights& w);
ExtTargetConfig ext_target_config_from_json(const Json& j);
Json to_json(const ExtTargetConfig& c);

ExperimentSpec spec_from_json(const Json& j);
Json to_json(const ExperimentSpec& spec);
ExperimentSpec load_spec(const std::filesystem::path& path);
/// Documented defaults for each case.
ExperimentSpec default_spec(ExperimentCase c);

/// Sorted-key compact dump of to_json(spec).
std::string canonical_json(const ExperimentSpec& spec);
/// Lower-case hex SHA-256 of canonical_json(spec).
std::string spec_hash(const ExperimentSpec& spec);

/// Node list with roles, positions and features.
Json scenario_to_json(const Scenario& scenario);
/// Thresholds, degree statistics and live edge counts per kind.
Json graph_summary_json(const TopologyGraph& graph);

}  // namespace lawn
