#pragma once

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <span>
#include <vector>

#include "lawn/rng.hpp"
#include "lawn/scenario.hpp"

namespace lawn {

/// Ellipse in the horizontal plane at center.z.
struct EllipseTarget {
  Position3 center;
  double semi_major_m = 30.0;
  double semi_minor_m = 15.0;
  double orientation_rad = 0.0;

  void validate() const;  // throws ConfigError unless a >= b > 0
  Position3 point_at(double t) const noexcept;  // parametric contour point
  /// Distance from the center to the contour along polar angle theta.
  double radius_at(double theta) const noexcept;
  /// Strictly inside or on the contour.
  bool contains(const Position3& p) const noexcept;

  friend bool operator==(const EllipseTarget&, const EllipseTarget&) = default;
};

struct Measurement {
  NodeId tx_id = 0;
  NodeId rx_id = 0;
  double aod_rad = 0.0;
  double toa_s = 0.0;
};

struct NoiseParams {
  double aod_sigma_rad = 0.5 * std::numbers::pi / 180.0;
  double toa_sigma_s = 3.336e-9;  // ~1 m of range

  void validate() const;
  friend bool operator==(const NoiseParams&, const NoiseParams&) = default;
};

struct GpParams {
  double lengthscale_rad = 0.5;
  double signal_std_m = 5.0;
  double noise_std_m = 1.0;
  std::size_t grid_points = 360;

  void validate() const;
  friend bool operator==(const GpParams&, const GpParams&) = default;
};

struct ContourEstimate {
  Position3 center_hat;
  std::vector<double> theta_grid;
  std::vector<double> radius_hat_m;
};

struct RingPlacement {
  std::vector<Node> emts;            // ids 0..n-1
  std::vector<NodeId> transmitters;  // first ceil(n/2) ids
  std::vector<NodeId> receivers;
};

/// n E-MTs on a ring around the target at the target altitude. Transmitters
/// and receivers alternate around the ring (slot 2k -> transmitter k, slot
/// 2k+1 -> receiver k, any surplus transmitters after that), each slot at
/// 2 pi s / n plus uniform jitter in +-jitter_rad from Rng::stream(seed, 0).
RingPlacement place_emts_ring(std::size_t n, const EllipseTarget& target, double ring_radius_m,
                              std::uint64_t seed,
                              double jitter_rad = 5.0 * std::numbers::pi / 180.0);

/// Contour point minimising |tx - p| + |p - rx|: best of 3600 uniform
/// parameter samples, refined by golden-section search to 1e-10 in the
/// parameter. Throws std::domain_error if tx or rx is inside the ellipse or the
/// tx-rx segment crosses it (forward scatter, no unique reflection).
Position3 specular_point(const Position3& tx, const Position3& rx, const EllipseTarget& target);

/// Bistatic path length |tx - p| + |p - rx|.
double bistatic_range(const Position3& tx, const Position3& p, const Position3& rx) noexcept;

Measurement simulate_measurement(const Node& tx, const Node& rx, const EllipseTarget& target,
                                 const NoiseParams& noise, Rng& rng);

/// Closed-form intersection of the departure ray with the bistatic ellipse.
/// Throws std::domain_error when c*toa <= |rx - tx| or the range is <= 0.
Position3 estimate_reflection_point(const Position3& tx, const Position3& rx,
                                    const Measurement& meas);

/// Component-wise mean. Throws ContractViolation on an empty list.
Position3 estimate_center(std::span<const Position3> points);

/// Periodic-kernel GP regression of radius on polar angle about center_hat,
/// with the mean training radius as prior mean. Throws ContractViolation for
/// no points or a point at the center; NumericalError if the Cholesky solve
/// fails even with jitter.
ContourEstimate gp_fit_contour(std::span<const Position3> points, const Position3& center_hat,
                               const GpParams& params);

/// Posterior mean at arbitrary angles (same model as gp_fit_contour).
std::vector<double> gp_posterior_mean(std::span<const Position3> points,
                                      const Position3& center_hat, const GpParams& params,
                                      std::span<const double> thetas);

struct ContourError {
  double mean_radial_err_m = 0.0;
  double max_radial_err_m = 0.0;
  std::size_t excluded = 0;
};

/// Per grid angle, |radius_hat - distance from the estimated center to the
/// true contour along that ray| (nearest positive root). Rays that miss are
/// excluded; more than half excluded throws ContractViolation.
ContourError contour_error(const ContourEstimate& estimate, const EllipseTarget& truth);
/// Distance along the ray from origin at angle theta to the true contour, or
/// NaN when the ray misses.
double ray_to_contour(const Position3& origin, double theta, const EllipseTarget& truth);

struct ExtTargetConfig {
  std::size_t n_emts = 8;
  double ring_radius_m = 38.0;
  double jitter_rad = 5.0 * std::numbers::pi / 180.0;
  EllipseTarget target{{0.0, 0.0, 30.0}, 30.0, 15.0, 0.0};
  NoiseParams noise;
  GpParams gp;

  void validate() const;
  friend bool operator==(const ExtTargetConfig&, const ExtTargetConfig&) = default;
};

struct ExtTargetRun {
  RingPlacement ring;
  std::vector<Measurement> measurements;
  std::vector<Position3> true_points;       // specular points
  std::vector<Position3> reflection_points; // estimated
  std::size_t rejected = 0;                 // infeasible measurements
  ContourEstimate contour;
  ContourError error;
  double center_error_m = 0.0;
  double mean_true_radius_m = 0.0;  // over the grid, about the true center
};

/// Full pipeline: ring (stream 0), all tx x rx measurements (stream 1),
/// reflection points, center, GP contour, error.
ExtTargetRun run_ext_target(const ExtTargetConfig& config, std::uint64_t seed);

/// theta_rad,radius_hat_m,radius_true_m
void write_contour_csv(std::ostream& os, const ExtTargetRun& run, const EllipseTarget& truth);

}  // namespace lawn
