#pragma once

#include "lawn/scenario.hpp"

namespace lawn {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

struct ChannelParams {
  double carrier_freq = 2.6e9;        // Hz
  double tx_power_dbm = 30.0;         // per E-MT
  double noise_dbm = -94.0;           // 10 MHz thermal + 10 dB NF
  double mainlobe_gain_linear = 4.0;  // 2x2 UPA toward the intended peer
  double offbeam_gain_linear = 1.0;
  double reflection_loss_db = 10.0;   // sensing echoes only
  double wpt_efficiency = 0.5;
  double slot_duration_s = 1e-3;

  void validate() const;  // throws ConfigError

  double tx_power_w() const noexcept;
  double noise_w() const noexcept;
  double mainlobe_gain_db() const noexcept;
  double offbeam_gain_db() const noexcept;

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

struct LinkGain {
  double gain_db = 0.0;
  double distance_m = 0.0;
};

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;
double dbm_to_watts(double dbm) noexcept;

/// Friis free-space loss 20 log10(4 pi d f / c). Throws std::domain_error for
/// d <= 0 or f <= 0.
double fspl_db(double distance_m, double freq_hz);

/// Array term (main lobe if steered, else off-beam) minus FSPL over the 3-D
/// distance. Throws std::domain_error for co-located nodes.
LinkGain link_gain(const Node& tx, const Node& rx, const ChannelParams& params, bool steered);
LinkGain link_gain(const Position3& tx, const Position3& rx, const ChannelParams& params,
                   bool steered);

inline double rss_dbm(double tx_power_dbm, const LinkGain& gain) noexcept {
  return tx_power_dbm + gain.gain_db;
}

/// Cascaded two-hop echo tx -> target -> rx with main-lobe gain at both ends
/// and a fixed reflection loss.
double echo_gain_db(const Node& tx, const Node& target, const Node& rx,
                    const ChannelParams& params);
double echo_gain_db(const Position3& tx, const Position3& target, const Position3& rx,
                    const ChannelParams& params);

}  // namespace lawn
