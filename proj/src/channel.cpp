#include "lawn/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lawn/errors.hpp"

namespace lawn {

void ChannelParams::validate() const {
  if (!(carrier_freq > 0.0) || !std::isfinite(carrier_freq))
    throw ConfigError("channel.carrier_freq must be > 0");
  if (!(mainlobe_gain_linear > 0.0) || !(offbeam_gain_linear > 0.0))
    throw ConfigError("channel antenna gains must be > 0");
  if (!(wpt_efficiency > 0.0 && wpt_efficiency <= 1.0))
    throw ConfigError("channel.wpt_efficiency must lie in (0, 1]");
  if (!(slot_duration_s > 0.0)) throw ConfigError("channel.slot_duration_s must be > 0");
  if (!std::isfinite(tx_power_dbm) || !std::isfinite(noise_dbm) ||
      !std::isfinite(reflection_loss_db))
    throw ConfigError("channel power/noise/reflection values must be finite");
}

double ChannelParams::tx_power_w() const noexcept { return dbm_to_watts(tx_power_dbm); }
double ChannelParams::noise_w() const noexcept { return dbm_to_watts(noise_dbm); }
double ChannelParams::mainlobe_gain_db() const noexcept {
  return linear_to_db(mainlobe_gain_linear);
}
double ChannelParams::offbeam_gain_db() const noexcept { return linear_to_db(offbeam_gain_linear); }

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) noexcept { return 10.0 * std::log10(linear); }
double dbm_to_watts(double dbm) noexcept { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double fspl_db(double distance_m, double freq_hz) {
  if (!(distance_m > 0.0)) throw std::domain_error("fspl_db: distance must be > 0");
  if (!(freq_hz > 0.0)) throw std::domain_error("fspl_db: frequency must be > 0");
  static const double kConst = 20.0 * std::log10(4.0 * std::numbers::pi / kSpeedOfLight);
  return 20.0 * std::log10(distance_m) + 20.0 * std::log10(freq_hz) + kConst;
}

LinkGain link_gain(const Position3& tx, const Position3& rx, const ChannelParams& params,
                   bool steered) {
  const double d = distance(tx, rx);
  if (!(d > 0.0)) throw std::domain_error("link_gain: co-located nodes");
  const double array_db = steered ? params.mainlobe_gain_db() : params.offbeam_gain_db();
  return {array_db - fspl_db(d, params.carrier_freq), d};
}

LinkGain link_gain(const Node& tx, const Node& rx, const ChannelParams& params, bool steered) {
  return link_gain(tx.pos, rx.pos, params, steered);
}

double echo_gain_db(const Position3& tx, const Position3& target, const Position3& rx,
                    const ChannelParams& params) {
  const double d1 = distance(tx, target);
  const double d2 = distance(target, rx);
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw std::domain_error("echo_gain_db: zero hop distance");
  return 2.0 * params.mainlobe_gain_db() - fspl_db(d1, params.carrier_freq) -
         fspl_db(d2, params.carrier_freq) - params.reflection_loss_db;
}

double echo_gain_db(const Node& tx, const Node& target, const Node& rx,
                    const ChannelParams& params) {
  return echo_gain_db(tx.pos, target.pos, rx.pos, params);
}

}  // namespace lawn
