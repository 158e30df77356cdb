// lawnsim: run, summarise and plot LAWN case-study experiments.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "lawn/errors.hpp"
#include "lawn/harness.hpp"
#include "lawn/plots.hpp"

namespace fs = std::filesystem;
using namespace lawn;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kEngineError = 3;

ResultTable load_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_csv(in);
}

int cmd_gen(const std::string& which) {
  std::cout << to_json(default_spec(case_from_string(which))).dump(2) << '\n';
  return kOk;
}

int cmd_run(const fs::path& spec_path, std::optional<std::size_t> seeds,
            std::optional<fs::path> out, std::size_t jobs) {
  ExperimentSpec spec = load_spec(spec_path);
  if (seeds) {
    spec.n_seeds = *seeds;
    spec.validate();
  }
  const ResultTable table = run_experiment(spec, jobs);
  const fs::path dir = out ? *out : output_dir(results_root(), spec);
  RunMeta meta;
  meta.spec_hash = spec_hash(spec);
  meta.jobs = jobs;
  write_outputs(dir, spec, table, meta);
  std::cout << dir.string() << '\n';
  return kOk;
}

int cmd_summarize(const fs::path& table_path) {
  std::cout << summarize(load_table(table_path)).dump(2) << '\n';
  return kOk;
}

int cmd_plot(const fs::path& table_path, std::optional<fs::path> out) {
  const ResultTable table = load_table(table_path);
  const fs::path dir = out ? *out : table_path.parent_path();
  fs::create_directories(dir.empty() ? fs::path(".") : dir);
  std::optional<Json> contour;
  const fs::path contour_path = table_path.parent_path() / "contour.json";
  if (detect_case(table) == ExperimentCase::ExtTarget && fs::exists(contour_path)) {
    std::ifstream in(contour_path);
    contour = Json::parse(in);
  }
  write_plots(dir.empty() ? fs::path(".") : dir, table, contour ? &*contour : nullptr);
  for (const SvgFile& f : render_plots(table, contour ? &*contour : nullptr))
    std::cout << (dir / f.name).string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LAWN topology-aware case-study simulator"};
  app.require_subcommand(1);

  std::string gen_case = "selection";
  auto* gen = app.add_subcommand("gen", "Print a default experiment spec");
  gen->add_option("--case", gen_case, "selection | delivery | ext_target")
      ->check(CLI::IsMember({"selection", "delivery", "ext_target"}));

  fs::path spec_path;
  std::optional<std::size_t> seeds;
  std::optional<fs::path> run_out;
  std::size_t jobs = 0;
  auto* run = app.add_subcommand("run", "Run an experiment spec");
  run->add_option("spec", spec_path, "Spec JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--seeds", seeds, "Override n_seeds");
  run->add_option("--out", run_out, "Output directory (default results/<case>/<hash>)");
  run->add_option("--jobs", jobs, "Worker threads (0 = OpenMP default)");

  fs::path table_path;
  auto* sum = app.add_subcommand("summarize", "Summary statistics of a result table");
  sum->add_option("table", table_path, "table.csv")->required()->check(CLI::ExistingFile);

  std::optional<fs::path> plot_out;
  auto* plot = app.add_subcommand("plot", "Render SVG plots of a result table");
  plot->add_option("table", table_path, "table.csv")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "Output directory (default: next to the table)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*gen) return cmd_gen(gen_case);
    if (*run) return cmd_run(spec_path, seeds, run_out, jobs);
    if (*sum) return cmd_summarize(table_path);
    if (*plot) return cmd_plot(table_path, plot_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const EngineError& e) {
    std::cerr << "engine error: " << e.what() << '\n';
    return kEngineError;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return kEngineError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kEngineError;
  }
  return kOk;
}
