#include "lawn/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "lawn/errors.hpp"

namespace lawn {

namespace {

/// Reads fields of one JSON object and rejects keys never asked for.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be a JSON object");
  }

  bool has(const std::string& key) {
    known_.insert(key);
    return j_.contains(key);
  }

  const Json& raw(const std::string& key) {
    known_.insert(key);
    return j_.at(key);
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    out = v.get<double>();
  }

  template <class U>
  void count(const std::string& key, U& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(where(key) + " must be a non-negative integer");
    const auto raw = v.get<std::uint64_t>();
    if (raw > std::numeric_limits<U>::max()) throw ConfigError(where(key) + " is too large");
    out = static_cast<U>(raw);
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + " must be a boolean");
    out = v.get<bool>();
  }

  std::string where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!known_.contains(key)) throw ConfigError("unknown key " + where(key));
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> known_;
};

ScenarioConfig read_scenario(const Json& j, const std::string& path, bool allow_seed) {
  ScenarioConfig c;
  ObjectReader r(j, path);
  r.number("area_x", c.area_x);
  r.number("area_y", c.area_y);
  r.number("alt_min", c.alt_min);
  r.number("alt_max", c.alt_max);
  r.count("n_emt_uav", c.n_emt_uav);
  r.count("n_emt_terrestrial", c.n_emt_terrestrial);
  r.count("n_comm_users", c.n_comm_users);
  r.number("frac_uav_users", c.frac_uav_users);
  r.count("n_charging_users", c.n_charging_users);
  r.count("n_sensing_targets", c.n_sensing_targets);
  if (allow_seed) r.count("seed", c.seed);
  else if (j.contains("seed"))
    throw ConfigError(path + ".seed is not allowed here; runs are seeded from base_seed");
  r.finish();
  c.validate();
  return c;
}

Position3 read_position(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(path + " must be an array [x, y, z]");
  Position3 p;
  double* out[3] = {&p.x, &p.y, &p.z};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ConfigError(path + " entries must be numbers");
    *out[i] = j[i].get<double>();
  }
  return p;
}

std::string hex(const unsigned char* data, std::size_t n) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 0xF]);
  }
  return out;
}

}  // namespace

std::string_view to_string(ExperimentCase c) noexcept {
  switch (c) {
    case ExperimentCase::Selection: return "selection";
    case ExperimentCase::Delivery: return "delivery";
    case ExperimentCase::ExtTarget: return "ext_target";
  }
  return "?";
}

ExperimentCase case_from_string(std::string_view name) {
  if (name == "selection") return ExperimentCase::Selection;
  if (name == "delivery") return ExperimentCase::Delivery;
  if (name == "ext_target") return ExperimentCase::ExtTarget;
  throw ConfigError("unknown case '" + std::string(name) +
                    "' (expected selection, delivery or ext_target)");
}

void ExperimentSpec::validate() const {
  scenario.validate();
  channel.validate();
  if (n_seeds == 0) throw ConfigError("n_seeds must be >= 1");
  const int blocks = int(selection.has_value()) + int(delivery.has_value()) +
                     int(ext_target.has_value());
  if (blocks != 1) throw ConfigError("exactly one case block must be present");
  switch (kind) {
    case ExperimentCase::Selection:
      if (!selection) throw ConfigError("case selection needs a 'selection' block");
      selection->weights.validate();
      break;
    case ExperimentCase::Delivery:
      if (!delivery) throw ConfigError("case delivery needs a 'delivery' block");
      if (delivery->n_trials == 0) throw ConfigError("delivery.n_trials must be >= 1");
      if (!(delivery->params.hop_processing_s >= 0.0))
        throw ConfigError("delivery.hop_processing_s must be >= 0");
      break;
    case ExperimentCase::ExtTarget:
      if (!ext_target) throw ConfigError("case ext_target needs an 'ext_target' block");
      ext_target->validate();
      break;
  }
  if (kind != ExperimentCase::ExtTarget) {
    if (threshold_db.has_value() == target_mean_degree.has_value())
      throw ConfigError("give exactly one of threshold_db and target_mean_degree");
    if (threshold_db && !std::isfinite(*threshold_db))
      throw ConfigError("threshold_db must be finite");
    if (target_mean_degree && !(*target_mean_degree > 0.0))
      throw ConfigError("target_mean_degree must be > 0");
  }
}

ScenarioConfig scenario_config_from_json(const Json& j) { return read_scenario(j, "scenario", true); }

Json to_json(const ScenarioConfig& c, bool include_seed) {
  Json j{{"area_x", c.area_x},
         {"area_y", c.area_y},
         {"alt_min", c.alt_min},
         {"alt_max", c.alt_max},
         {"n_emt_uav", c.n_emt_uav},
         {"n_emt_terrestrial", c.n_emt_terrestrial},
         {"n_comm_users", c.n_comm_users},
         {"frac_uav_users", c.frac_uav_users},
         {"n_charging_users", c.n_charging_users},
         {"n_sensing_targets", c.n_sensing_targets}};
  if (include_seed) j["seed"] = c.seed;
  return j;
}

ChannelParams channel_params_from_json(const Json& j) {
  ChannelParams p;
  ObjectReader r(j, "channel");
  r.number("carrier_freq", p.carrier_freq);
  r.number("tx_power_dbm", p.tx_power_dbm);
  r.number("noise_dbm", p.noise_dbm);
  r.number("mainlobe_gain_linear", p.mainlobe_gain_linear);
  r.number("offbeam_gain_linear", p.offbeam_gain_linear);
  r.number("reflection_loss_db", p.reflection_loss_db);
  r.number("wpt_efficiency", p.wpt_efficiency);
  r.number("slot_duration_s", p.slot_duration_s);
  r.finish();
  p.validate();
  return p;
}

Json to_json(const ChannelParams& p) {
  return Json{{"carrier_freq", p.carrier_freq},
              {"tx_power_dbm", p.tx_power_dbm},
              {"noise_dbm", p.noise_dbm},
              {"mainlobe_gain_linear", p.mainlobe_gain_linear},
              {"offbeam_gain_linear", p.offbeam_gain_linear},
              {"reflection_loss_db", p.reflection_loss_db},
              {"wpt_efficiency", p.wpt_efficiency},
              {"slot_duration_s", p.slot_duration_s}};
}

ObjectiveWeights weights_from_json(const Json& j) {
  ObjectiveWeights w;
  ObjectReader r(j, "selection.weights");
  r.number("w_se", w.w_se);
  r.number("w_sens", w.w_sens);
  r.number("w_wpt", w.w_wpt);
  r.finish();
  w.validate();
  return w;
}

Json to_json(const ObjectiveWeights& w) {
  return Json{{"w_se", w.w_se}, {"w_sens", w.w_sens}, {"w_wpt", w.w_wpt}};
}

ExtTargetConfig ext_target_config_from_json(const Json& j) {
  ExtTargetConfig c;
  ObjectReader r(j, "ext_target");
  r.count("n_emts", c.n_emts);
  r.number("ring_radius_m", c.ring_radius_m);
  r.number("jitter_rad", c.jitter_rad);
  if (r.has("target")) {
    ObjectReader t(r.raw("target"), "ext_target.target");
    if (t.has("center")) c.target.center = read_position(t.raw("center"), "ext_target.target.center");
    t.number("semi_major_m", c.target.semi_major_m);
    t.number("semi_minor_m", c.target.semi_minor_m);
    t.number("orientation_rad", c.target.orientation_rad);
    t.finish();
  }
  if (r.has("noise")) {
    ObjectReader n(r.raw("noise"), "ext_target.noise");
    n.number("aod_sigma_rad", c.noise.aod_sigma_rad);
    n.number("toa_sigma_s", c.noise.toa_sigma_s);
    n.finish();
  }
  if (r.has("gp")) {
    ObjectReader g(r.raw("gp"), "ext_target.gp");
    g.number("lengthscale_rad", c.gp.lengthscale_rad);
    g.number("signal_std_m", c.gp.signal_std_m);
    g.number("noise_std_m", c.gp.noise_std_m);
    g.count("grid_points", c.gp.grid_points);
    g.finish();
  }
  r.finish();
  c.validate();
  return c;
}

Json to_json(const ExtTargetConfig& c) {
  const Position3& p = c.target.center;
  return Json{{"n_emts", c.n_emts},
              {"ring_radius_m", c.ring_radius_m},
              {"jitter_rad", c.jitter_rad},
              {"target",
               {{"center", {p.x, p.y, p.z}},
                {"semi_major_m", c.target.semi_major_m},
                {"semi_minor_m", c.target.semi_minor_m},
                {"orientation_rad", c.target.orientation_rad}}},
              {"noise",
               {{"aod_sigma_rad", c.noise.aod_sigma_rad}, {"toa_sigma_s", c.noise.toa_sigma_s}}},
              {"gp",
               {{"lengthscale_rad", c.gp.lengthscale_rad},
                {"signal_std_m", c.gp.signal_std_m},
                {"noise_std_m", c.gp.noise_std_m},
                {"grid_points", c.gp.grid_points}}}};
}

ExperimentSpec spec_from_json(const Json& j) {
  ExperimentSpec s;
  ObjectReader r(j, "");
  if (!r.has("case")) throw ConfigError("missing key case");
  const Json& kind = r.raw("case");
  if (!kind.is_string()) throw ConfigError("case must be a string");
  s.kind = case_from_string(kind.get<std::string>());
  if (r.has("scenario")) s.scenario = read_scenario(r.raw("scenario"), "scenario", false);
  if (r.has("channel")) s.channel = channel_params_from_json(r.raw("channel"));
  if (r.has("threshold_db")) {
    double v = 0.0;
    r.number("threshold_db", v);
    s.threshold_db = v;
  }
  if (r.has("target_mean_degree")) {
    double v = 0.0;
    r.number("target_mean_degree", v);
    s.target_mean_degree = v;
  }
  r.count("n_seeds", s.n_seeds);
  r.count("base_seed", s.base_seed);
  if (r.has("selection")) {
    SelectionBlock b;
    ObjectReader sr(r.raw("selection"), "selection");
    if (sr.has("weights")) b.weights = weights_from_json(sr.raw("weights"));
    sr.number("qos_floor_db", b.params.qos_floor_db);
    sr.count("max_brute_force_users", b.params.max_brute_force_users);
    sr.boolean("brute_force", b.brute_force);
    sr.finish();
    s.selection = b;
  }
  if (r.has("delivery")) {
    DeliveryBlock b;
    ObjectReader dr(r.raw("delivery"), "delivery");
    dr.count("n_trials", b.n_trials);
    dr.number("hop_processing_s", b.params.hop_processing_s);
    dr.finish();
    s.delivery = b;
  }
  if (r.has("ext_target")) s.ext_target = ext_target_config_from_json(r.raw("ext_target"));
  r.finish();
  s.validate();
  return s;
}

Json to_json(const ExperimentSpec& s) {
  Json j{{"case", std::string(to_string(s.kind))},
         {"scenario", to_json(s.scenario, false)},
         {"channel", to_json(s.channel)},
         {"n_seeds", s.n_seeds},
         {"base_seed", s.base_seed}};
  if (s.threshold_db) j["threshold_db"] = *s.threshold_db;
  if (s.target_mean_degree) j["target_mean_degree"] = *s.target_mean_degree;
  if (s.selection)
    j["selection"] = {{"weights", to_json(s.selection->weights)},
                      {"qos_floor_db", s.selection->params.qos_floor_db},
                      {"max_brute_force_users", s.selection->params.max_brute_force_users},
                      {"brute_force", s.selection->brute_force}};
  if (s.delivery)
    j["delivery"] = {{"n_trials", s.delivery->n_trials},
                     {"hop_processing_s", s.delivery->params.hop_processing_s}};
  if (s.ext_target) j["ext_target"] = to_json(*s.ext_target);
  return j;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return spec_from_json(j);
}

ExperimentSpec default_spec(ExperimentCase c) {
  ExperimentSpec s;
  s.kind = c;
  switch (c) {
    case ExperimentCase::Selection:
      s.scenario.area_x = s.scenario.area_y = 400.0;
      s.scenario.n_emt_uav = 2;
      s.scenario.n_emt_terrestrial = 2;
      s.scenario.n_comm_users = 16;
      s.target_mean_degree = 4.0;
      s.n_seeds = 200;
      s.selection = SelectionBlock{};
      break;
    case ExperimentCase::Delivery:
      s.target_mean_degree = 4.0;
      s.n_seeds = 5;
      s.delivery = DeliveryBlock{};
      break;
    case ExperimentCase::ExtTarget:
      s.n_seeds = 100;
      s.ext_target = ExtTargetConfig{};
      break;
  }
  return s;
}

std::string canonical_json(const ExperimentSpec& spec) { return to_json(spec).dump(); }

std::string spec_hash(const ExperimentSpec& spec) {
  const std::string text = canonical_json(spec);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw NumericalError("SHA-256 digest failed");
  return hex(digest, len);
}

Json scenario_to_json(const Scenario& scenario) {
  Json nodes = Json::array();
  for (const Node& n : scenario.nodes())
    nodes.push_back({{"id", n.id},
                     {"role", std::string(to_string(n.role))},
                     {"pos", {n.pos.x, n.pos.y, n.pos.z}},
                     {"aerial", n.aerial},
                     {"battery", n.features.battery},
                     {"compute_capacity", n.features.compute_capacity},
                     {"task_priority", n.features.task_priority},
                     {"active", n.features.active}});
  return Json{{"config", to_json(scenario.config())}, {"nodes", std::move(nodes)}};
}

Json graph_summary_json(const TopologyGraph& graph) {
  const DegreeStats d = degree_stats(graph);
  std::size_t conn = 0, interf = 0;
  for (const Edge& e : graph.built_edges()) {
    if (!graph.is_live(e)) continue;
    (e.kind == EdgeKind::Connectivity ? conn : interf)++;
  }
  Json j{{"n_nodes", graph.size()},
         {"threshold_db", graph.threshold_db()},
         {"active_nodes", d.active_nodes},
         {"live_connectivity_edges", conn},
         {"live_interference_edges", interf},
         {"mean_degree", d.mean_degree},
         {"min_degree", d.min_degree},
         {"max_degree", d.max_degree},
         {"components", d.components}};
  if (std::isfinite(graph.interference_threshold_db()))
    j["interference_threshold_db"] = graph.interference_threshold_db();
  return j;
}

}  // namespace lawn
