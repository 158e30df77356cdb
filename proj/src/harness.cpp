#include "lawn/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <numeric>

#include "lawn/errors.hpp"
#include "lawn/plots.hpp"

namespace lawn {

namespace {

const std::vector<std::string>& selection_columns() {
  static const std::vector<std::string> c{"seed",           "method",       "n_active_users",
                                          "sum_se",         "sensing_sinr_db", "wpt_energy_j",
                                          "scalar_objective"};
  return c;
}

const std::vector<std::string>& delivery_columns() {
  static const std::vector<std::string> c{"seed",          "method",          "n_trials",
                                          "success_rate",  "mean_delay_ms",   "median_delay_ms",
                                          "mean_hops",     "threshold_db",    "mean_degree"};
  return c;
}

const std::vector<std::string>& ext_target_columns() {
  static const std::vector<std::string> c{"seed",         "n_points",          "n_rejected",
                                          "center_err_m", "mean_radial_err_m", "max_radial_err_m",
                                          "mean_true_radius_m", "rel_mean_err"};
  return c;
}

std::int64_t as_int(std::uint64_t v) { return static_cast<std::int64_t>(v); }

std::vector<std::vector<Cell>> selection_rows(const ExperimentSpec& spec, std::uint64_t seed) {
  const Scenario scenario = generate_scenario(scenario_for_seed(spec, seed));
  const TopologyGraph graph = build_graph(scenario, spec.channel, resolve_threshold(spec, scenario));
  const SelectionBlock& b = *spec.selection;
  std::vector<SelectionResult> results;
  results.push_back(select_none(graph, spec.channel, b.weights));
  results.push_back(select_user_centric(graph, spec.channel, b.weights, b.params));
  results.push_back(select_topology_aware(graph, spec.channel, b.weights));
  if (b.brute_force)
    results.push_back(
        select_brute_force(graph, spec.channel, b.weights, b.params.max_brute_force_users));
  std::vector<std::vector<Cell>> rows;
  for (const SelectionResult& r : results)
    rows.push_back({as_int(seed), std::string(to_string(r.method)),
                    static_cast<std::int64_t>(r.n_active_users(graph)), r.metrics.sum_se,
                    r.metrics.sensing_sinr_db, r.metrics.wpt_energy_j, r.scalar_objective});
  return rows;
}

std::vector<std::vector<Cell>> delivery_rows(const ExperimentSpec& spec, std::uint64_t seed) {
  const Scenario scenario = generate_scenario(scenario_for_seed(spec, seed));
  const double threshold = resolve_threshold(spec, scenario);
  const TopologyGraph graph = build_graph(scenario, spec.channel, threshold);
  const DeliveryReport report = run_delivery_experiment(graph, spec.delivery->params,
                                                        spec.delivery->n_trials, seed);
  const double mean_degree = degree_stats(graph).mean_degree;
  std::vector<std::vector<Cell>> rows;
  for (const MethodAggregate& m : report.methods)
    rows.push_back({as_int(seed), std::string(to_string(m.method)),
                    static_cast<std::int64_t>(m.n_trials), m.success_rate, m.mean_delay_ms,
                    m.median_delay_ms, m.mean_hops, threshold, mean_degree});
  return rows;
}

std::vector<std::vector<Cell>> ext_target_rows(const ExperimentSpec& spec, std::uint64_t seed) {
  const ExtTargetRun run = run_ext_target(*spec.ext_target, seed);
  return {{as_int(seed), static_cast<std::int64_t>(run.reflection_points.size()),
           static_cast<std::int64_t>(run.rejected), run.center_error_m,
           run.error.mean_radial_err_m, run.error.max_radial_err_m, run.mean_true_radius_m,
           run.error.mean_radial_err_m / run.mean_true_radius_m}};
}

struct Stats {
  std::size_t n = 0;
  std::size_t nonfinite = 0;
  double mean = 0.0, median = 0.0, std = 0.0, min = 0.0, max = 0.0;
};

Stats stats_of(std::vector<double> values) {
  Stats s;
  std::erase_if(values, [&](double v) {
    const bool bad = !std::isfinite(v);
    s.nonfinite += bad;
    return bad;
  });
  s.n = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  const std::size_t mid = values.size() / 2;
  s.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  s.min = values.front();
  s.max = values.back();
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    std::transform(values.begin(), values.end(), sq.begin(),
                   [&](double v) { return (v - s.mean) * (v - s.mean); });
    std::sort(sq.begin(), sq.end());
    s.std = std::sqrt(std::accumulate(sq.begin(), sq.end(), 0.0) / (n - 1.0));
  }
  return s;
}

Json to_json(const Stats& s) {
  Json j{{"n", s.n}, {"n_nonfinite", s.nonfinite}};
  if (s.n == 0) {
    for (const char* k : {"mean", "median", "std", "min", "max"}) j[k] = nullptr;
  } else {
    j["mean"] = s.mean;
    j["median"] = s.median;
    j["std"] = s.std;
    j["min"] = s.min;
    j["max"] = s.max;
  }
  return j;
}

bool is_numeric_column(const ResultTable& t, std::size_t c) {
  return std::all_of(t.rows.begin(), t.rows.end(),
                     [&](const auto& row) { return !std::holds_alternative<std::string>(row[c]); });
}

Json column_stats(const ResultTable& t, const std::vector<std::size_t>& rows) {
  Json j = Json::object();
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (t.columns[c] == "seed" || !is_numeric_column(t, c)) continue;
    std::vector<double> v;
    for (std::size_t r : rows) {
      const Cell& cell = t.rows[r][c];
      v.push_back(std::holds_alternative<double>(cell) ? std::get<double>(cell)
                                                       : static_cast<double>(std::get<std::int64_t>(cell)));
    }
    j[t.columns[c]] = to_json(stats_of(std::move(v)));
  }
  return j;
}

// seed -> method -> column value
std::map<std::int64_t, std::map<std::string, double>> by_seed(const ResultTable& t,
                                                               const std::string& column) {
  const auto seeds = t.numeric_column("seed");
  const auto methods = t.string_column("method");
  const auto values = t.numeric_column(column);
  std::map<std::int64_t, std::map<std::string, double>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out[static_cast<std::int64_t>(seeds[r])][methods[r]] = values[r];
  return out;
}

Json selection_extras(const ResultTable& t) {
  const auto obj = by_seed(t, "scalar_objective");
  std::size_t n = 0, ge_none = 0, ge_uc = 0, bf_seeds = 0, bf_ge_ta = 0;
  std::vector<double> gaps;
  for (const auto& [seed, m] : obj) {
    if (!m.contains("TopologyAware") || !m.contains("NoSelection") || !m.contains("UserCentric"))
      continue;
    ++n;
    const double ta = m.at("TopologyAware");
    ge_none += ta >= m.at("NoSelection");
    ge_uc += ta >= m.at("UserCentric");
    if (auto it = m.find("BruteForce"); it != m.end()) {
      ++bf_seeds;
      bf_ge_ta += it->second >= ta;
      gaps.push_back(it->second == 0.0 ? 0.0 : (it->second - ta) / std::abs(it->second));
    }
  }
  Json j{{"paired_seeds", n},
         {"ta_ge_none_fraction", n ? double(ge_none) / double(n) : 0.0},
         {"ta_ge_user_centric_fraction", n ? double(ge_uc) / double(n) : 0.0}};
  if (bf_seeds) {
    j["brute_force_seeds"] = bf_seeds;
    j["brute_force_ge_ta_fraction"] = double(bf_ge_ta) / double(bf_seeds);
    j["brute_force_relative_gap"] = to_json(stats_of(gaps));
  }
  return j;
}

Json delivery_extras(const ResultTable& t) {
  const auto methods = t.string_column("method");
  const auto rate = t.numeric_column("success_rate");
  const auto trials = t.numeric_column("n_trials");
  std::map<std::string, std::pair<double, double>> acc;  // successes, trials
  std::map<std::string, std::vector<double>> weighted;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    weighted[methods[r]].push_back(rate[r] * trials[r]);
    acc[methods[r]].second += trials[r];
  }
  Json j = Json::object();
  for (auto& [m, w] : weighted) {
    std::sort(w.begin(), w.end());
    const double successes = std::accumulate(w.begin(), w.end(), 0.0);
    j[m] = acc[m].second > 0 ? successes / acc[m].second : 0.0;
  }
  return Json{{"pooled_success_rate", j}};
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

std::vector<std::string> table_columns(ExperimentCase c) {
  switch (c) {
    case ExperimentCase::Selection: return selection_columns();
    case ExperimentCase::Delivery: return delivery_columns();
    case ExperimentCase::ExtTarget: return ext_target_columns();
  }
  return {};
}

ExperimentCase detect_case(const ResultTable& table) {
  for (ExperimentCase c :
       {ExperimentCase::Selection, ExperimentCase::Delivery, ExperimentCase::ExtTarget})
    if (table.columns == table_columns(c)) return c;
  throw ConfigError("table header matches no known case");
}

ScenarioConfig scenario_for_seed(const ExperimentSpec& spec, std::uint64_t seed) {
  ScenarioConfig c = spec.scenario;
  c.seed = seed;
  return c;
}

double resolve_threshold(const ExperimentSpec& spec, const Scenario& scenario) {
  if (spec.threshold_db) return *spec.threshold_db;
  if (spec.target_mean_degree)
    return calibrate_threshold(scenario, spec.channel, *spec.target_mean_degree);
  throw ConfigError("no threshold rule in spec");
}

std::vector<std::vector<Cell>> run_seed(const ExperimentSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case ExperimentCase::Selection: return selection_rows(spec, seed);
    case ExperimentCase::Delivery: return delivery_rows(spec, seed);
    case ExperimentCase::ExtTarget: return ext_target_rows(spec, seed);
  }
  return {};
}

ResultTable run_experiment(const ExperimentSpec& spec, std::size_t jobs) {
  spec.validate();
  const std::size_t n = spec.n_seeds;
  std::vector<std::vector<std::vector<Cell>>> per_seed(n);
  std::vector<std::string> errors(n);
  std::vector<char> failed(n, 0);
  const int threads = jobs == 0 ? omp_get_max_threads() : static_cast<int>(jobs);

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    try {
      per_seed[i] = run_seed(spec, spec.base_seed + static_cast<std::uint64_t>(i));
    } catch (const std::exception& e) {
      failed[i] = 1;
      errors[i] = e.what();
    }
  }

  ResultTable table;
  table.columns = table_columns(spec.kind);
  for (std::size_t i = 0; i < n; ++i) {
    if (failed[i]) throw EngineError(spec.base_seed + i, errors[i]);
    for (auto& row : per_seed[i]) table.add_row(std::move(row));
  }
  return table;
}

Json summarize(const ResultTable& table) {
  if (table.rows.empty()) throw ContractViolation("summarize: empty table");
  Json j{{"n_rows", table.rows.size()}};
  const ExperimentCase c = detect_case(table);
  j["case"] = std::string(to_string(c));
  if (table.has_column("method")) {
    const auto methods = table.string_column("method");
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t r = 0; r < methods.size(); ++r) groups[methods[r]].push_back(r);
    Json g = Json::object();
    for (const auto& [m, rows] : groups) g[m] = column_stats(table, rows);
    j["methods"] = std::move(g);
  } else {
    std::vector<std::size_t> rows(table.rows.size());
    std::iota(rows.begin(), rows.end(), 0);
    j["columns"] = column_stats(table, rows);
  }
  if (c == ExperimentCase::Selection) j["selection"] = selection_extras(table);
  if (c == ExperimentCase::Delivery) j["delivery"] = delivery_extras(table);
  if (c == ExperimentCase::ExtTarget) {
    const auto rel = table.numeric_column("rel_mean_err");
    j["ext_target"] = {{"seeds_within_10pct",
                        std::count_if(rel.begin(), rel.end(), [](double v) { return v <= 0.10; })}};
  }
  return j;
}

Json to_json(const RunMeta& meta) {
  return Json{{"spec_hash", meta.spec_hash},
              {"version", meta.version},
              {"timestamp", meta.timestamp.empty() ? utc_now() : meta.timestamp},
              {"jobs", meta.jobs}};
}

std::filesystem::path results_root() {
  if (const char* env = std::getenv("LAWN_RESULTS_DIR"); env && *env) return env;
  return "results";
}

std::filesystem::path output_dir(const std::filesystem::path& root, const ExperimentSpec& spec) {
  return root / std::string(to_string(spec.kind)) / spec_hash(spec);
}

Json contour_json(const ExtTargetConfig& config, std::uint64_t seed) {
  const ExtTargetRun run = run_ext_target(config, seed);
  auto xy = [](const Position3& p) { return Json::array({p.x, p.y}); };
  Json truth = Json::array(), estimate = Json::array(), points = Json::array();
  for (std::size_t k = 0; k < run.contour.theta_grid.size(); ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) /
                     static_cast<double>(run.contour.theta_grid.size());
    truth.push_back(xy(config.target.point_at(t)));
    const double th = run.contour.theta_grid[k];
    const double r = run.contour.radius_hat_m[k];
    estimate.push_back({run.contour.center_hat.x + r * std::cos(th),
                        run.contour.center_hat.y + r * std::sin(th)});
  }
  for (const Position3& p : run.reflection_points) points.push_back(xy(p));
  Json emts = Json::array();
  for (const Node& n : run.ring.emts) emts.push_back(xy(n.pos));
  return Json{{"seed", seed},
              {"true_contour", truth},
              {"estimated_contour", estimate},
              {"reflection_points", points},
              {"true_center", xy(config.target.center)},
              {"estimated_center", xy(run.contour.center_hat)},
              {"emts", emts}};
}

void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                   const ResultTable& table, const RunMeta& meta) {
  std::filesystem::create_directories(dir);
  write_text(dir / "spec.json", to_json(spec).dump(2) + "\n");
  {
    std::ofstream out(dir / "table.csv", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / "table.csv").string());
    write_csv(out, table);
  }
  write_text(dir / "summary.json", summarize(table).dump(2) + "\n");
  write_text(dir / "meta.json", to_json(meta).dump(2) + "\n");
  Json contour;
  if (spec.kind == ExperimentCase::ExtTarget) {
    contour = contour_json(*spec.ext_target, spec.base_seed);
    write_text(dir / "contour.json", contour.dump(2) + "\n");
  }
  write_plots(dir, table, spec.kind == ExperimentCase::ExtTarget ? &contour : nullptr);
}

}  // namespace lawn
