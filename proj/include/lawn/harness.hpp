#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lawn/config.hpp"
#include "lawn/result_table.hpp"

namespace lawn {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Column list of each case's table.
std::vector<std::string> table_columns(ExperimentCase c);
/// Case whose column list matches the table header; throws ConfigError.
ExperimentCase detect_case(const ResultTable& table);

/// Scenario of run i: spec.scenario with seed base_seed + i.
ScenarioConfig scenario_for_seed(const ExperimentSpec& spec, std::uint64_t seed);
/// Fixed threshold_db, or calibrate_threshold(scenario, channel, target_mean_degree).
double resolve_threshold(const ExperimentSpec& spec, const Scenario& scenario);

/// Rows for a single seed, in method order.
std::vector<std::vector<Cell>> run_seed(const ExperimentSpec& spec, std::uint64_t seed);

/// Seeds base_seed .. base_seed + n_seeds - 1 over `jobs` OpenMP threads
/// (0 = runtime default). Rows are stored per seed and emitted in seed order,
/// so the table is independent of jobs. Any engine exception aborts the run
/// with an EngineError for the lowest failing seed.
ResultTable run_experiment(const ExperimentSpec& spec, std::size_t jobs = 0);

/// Per column: n, n_nonfinite, mean, median, std (n - 1), min, max over finite
/// values (sorted before summing), grouped by method when present. Adds
/// per-method success rates for delivery tables and paired orderings and the
/// brute-force gap for selection tables.
Json summarize(const ResultTable& table);

struct RunMeta {
  std::string spec_hash;
  std::string version = kArtifactVersion;
  std::string timestamp;  // UTC ISO-8601
  std::size_t jobs = 0;
};
Json to_json(const RunMeta& meta);

/// $LAWN_RESULTS_DIR or "results".
std::filesystem::path results_root();
/// root/<case>/<spec hash>
std::filesystem::path output_dir(const std::filesystem::path& root, const ExperimentSpec& spec);

/// Writes spec.json, table.csv, summary.json, meta.json, plots, and for
/// ext_target the first seed's contour.json.
void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                   const ResultTable& table, const RunMeta& meta);

/// Reconstruction data of one ext_target run for the overlay plot.
Json contour_json(const ExtTargetConfig& config, std::uint64_t seed);

}  // namespace lawn
