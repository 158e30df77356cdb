#include "lawn/exttarget.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "lawn/channel.hpp"
#include "lawn/errors.hpp"
#include "lawn/format.hpp"

namespace lawn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kCoarseSamples = 3600;
constexpr double kParamTolerance = 1e-10;
constexpr double kCholeskyJitter = 1e-10;

struct Local {
  double x;
  double y;
};

// Into the ellipse frame (centered, axis-aligned).
Local to_local(const EllipseTarget& e, double x, double y) noexcept {
  const double c = std::cos(e.orientation_rad);
  const double s = std::sin(e.orientation_rad);
  const double dx = x - e.center.x;
  const double dy = y - e.center.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Local rotate_to_local(const EllipseTarget& e, double dx, double dy) noexcept {
  const double c = std::cos(e.orientation_rad);
  const double s = std::sin(e.orientation_rad);
  return {c * dx + s * dy, -s * dx + c * dy};
}

bool segment_crosses(const EllipseTarget& e, const Position3& p0, const Position3& p1) noexcept {
  // Scale to the unit circle and test the segment's distance to the origin.
  const Local a = to_local(e, p0.x, p0.y);
  const Local b = to_local(e, p1.x, p1.y);
  const double ax = a.x / e.semi_major_m, ay = a.y / e.semi_minor_m;
  const double bx = b.x / e.semi_major_m, by = b.y / e.semi_minor_m;
  const double vx = bx - ax, vy = by - ay;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? -(ax * vx + ay * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double cx = ax + t * vx, cy = ay + t * vy;
  return cx * cx + cy * cy <= 1.0;
}

double wrap_angle(double theta) noexcept {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

struct PolarData {
  std::vector<double> theta;
  Eigen::VectorXd radius;
  double prior_mean = 0.0;
};

PolarData to_polar(std::span<const Position3> points, const Position3& center) {
  if (points.empty()) throw ContractViolation("gp_fit_contour: no training points");
  PolarData d;
  d.theta.reserve(points.size());
  d.radius.resize(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dx = points[i].x - center.x;
    const double dy = points[i].y - center.y;
    const double r = std::hypot(dx, dy);
    if (!(r > 0.0)) throw ContractViolation("gp_fit_contour: training point at the center");
    d.theta.push_back(wrap_angle(std::atan2(dy, dx)));
    d.radius(static_cast<Eigen::Index>(i)) = r;
  }
  d.prior_mean = d.radius.mean();
  return d;
}

double periodic_kernel(double t1, double t2, const GpParams& p) noexcept {
  const double s = std::sin(0.5 * (t1 - t2));
  return p.signal_std_m * p.signal_std_m *
         std::exp(-2.0 * s * s / (p.lengthscale_rad * p.lengthscale_rad));
}

}  // namespace

void EllipseTarget::validate() const {
  if (!(semi_minor_m > 0.0) || !(semi_major_m >= semi_minor_m) || !std::isfinite(semi_major_m))
    throw ConfigError("ellipse target needs semi_major >= semi_minor > 0");
  if (!std::isfinite(orientation_rad) || !std::isfinite(center.x) || !std::isfinite(center.y) ||
      !std::isfinite(center.z))
    throw ConfigError("ellipse target center/orientation must be finite");
}

Position3 EllipseTarget::point_at(double t) const noexcept {
  const double lx = semi_major_m * std::cos(t);
  const double ly = semi_minor_m * std::sin(t);
  const double c = std::cos(orientation_rad);
  const double s = std::sin(orientation_rad);
  return {center.x + c * lx - s * ly, center.y + s * lx + c * ly, center.z};
}

double EllipseTarget::radius_at(double theta) const noexcept {
  const double alpha = theta - orientation_rad;
  const double ca = std::cos(alpha) / semi_major_m;
  const double sa = std::sin(alpha) / semi_minor_m;
  return 1.0 / std::sqrt(ca * ca + sa * sa);
}

bool EllipseTarget::contains(const Position3& p) const noexcept {
  const Local l = to_local(*this, p.x, p.y);
  const double u = l.x / semi_major_m;
  const double v = l.y / semi_minor_m;
  return u * u + v * v <= 1.0;
}

void NoiseParams::validate() const {
  if (!(aod_sigma_rad >= 0.0) || !(toa_sigma_s >= 0.0))
    throw ConfigError("noise standard deviations must be >= 0");
}

void GpParams::validate() const {
  if (!(lengthscale_rad > 0.0) || !(signal_std_m > 0.0) || !(noise_std_m > 0.0))
    throw ConfigError("GP lengthscale, signal_std and noise_std must be > 0");
  if (grid_points < 8) throw ConfigError("GP grid_points must be >= 8");
}

void ExtTargetConfig::validate() const {
  if (n_emts < 2) throw ConfigError("ext_target.n_emts must be >= 2");
  if (!(ring_radius_m > 0.0)) throw ConfigError("ext_target.ring_radius_m must be > 0");
  if (!(jitter_rad >= 0.0)) throw ConfigError("ext_target.jitter_rad must be >= 0");
  target.validate();
  noise.validate();
  gp.validate();
}

RingPlacement place_emts_ring(std::size_t n, const EllipseTarget& target, double ring_radius_m,
                              std::uint64_t seed, double jitter_rad) {
  if (n < 2) throw ContractViolation("place_emts_ring: need at least 2 E-MTs");
  const std::size_t n_tx = (n + 1) / 2;
  const std::size_t n_rx = n - n_tx;
  Rng rng = Rng::stream(seed, 0);

  RingPlacement out;
  out.emts.resize(n);
  std::size_t next_tx = 0;
  for (std::size_t slot = 0; slot < n; ++slot) {
    const double angle =
        kTwoPi * static_cast<double>(slot) / static_cast<double>(n) + rng.uniform(-jitter_rad, jitter_rad);
    NodeId id;
    if (slot % 2 == 1 && (slot - 1) / 2 < n_rx)
      id = static_cast<NodeId>(n_tx + (slot - 1) / 2);
    else
      id = static_cast<NodeId>(next_tx++);
    Node& node = out.emts[id];
    node.id = id;
    node.role = NodeRole::EmtUav;
    node.aerial = true;
    node.features.compute_capacity = 1.0;
    node.pos = {target.center.x + ring_radius_m * std::cos(angle),
                target.center.y + ring_radius_m * std::sin(angle), target.center.z};
  }
  for (std::size_t i = 0; i < n_tx; ++i) out.transmitters.push_back(static_cast<NodeId>(i));
  for (std::size_t i = n_tx; i < n; ++i) out.receivers.push_back(static_cast<NodeId>(i));
  return out;
}

double bistatic_range(const Position3& tx, const Position3& p, const Position3& rx) noexcept {
  return distance(tx, p) + distance(p, rx);
}

Position3 specular_point(const Position3& tx, const Position3& rx, const EllipseTarget& target) {
  if (target.contains(tx) || target.contains(rx))
    throw std::domain_error("specular_point: transmitter or receiver inside the target");
  if (segment_crosses(target, tx, rx))
    throw std::domain_error("specular_point: tx-rx line of sight crosses the target");

  auto path = [&](double t) { return bistatic_range(tx, target.point_at(t), rx); };
  const double step = kTwoPi / kCoarseSamples;
  int best = 0;
  double best_len = path(0.0);
  for (int k = 1; k < kCoarseSamples; ++k) {
    const double len = path(step * k);
    if (len < best_len) {
      best_len = len;
      best = k;
    }
  }

  // Golden-section refinement on the bracket around the best sample.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = step * (best - 1);
  double hi = step * (best + 1);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = path(x1);
  double f2 = path(x2);
  while (hi - lo > kParamTolerance) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = path(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = path(x2);
    }
  }
  const double t_refined = 0.5 * (lo + hi);
  return path(t_refined) <= best_len ? target.point_at(t_refined) : target.point_at(step * best);
}

Measurement simulate_measurement(const Node& tx, const Node& rx, const EllipseTarget& target,
                                 const NoiseParams& noise, Rng& rng) {
  const Position3 p = specular_point(tx.pos, rx.pos, target);
  Measurement m;
  m.tx_id = tx.id;
  m.rx_id = rx.id;
  m.aod_rad = std::atan2(p.y - tx.pos.y, p.x - tx.pos.x) + rng.normal(0.0, noise.aod_sigma_rad);
  m.toa_s = bistatic_range(tx.pos, p, rx.pos) / kSpeedOfLight + rng.normal(0.0, noise.toa_sigma_s);
  m.toa_s = std::max(m.toa_s, distance(tx.pos, rx.pos) / kSpeedOfLight);
  return m;
}

Position3 estimate_reflection_point(const Position3& tx, const Position3& rx,
                                    const Measurement& meas) {
  const double range = kSpeedOfLight * meas.toa_s;
  const double dx = rx.x - tx.x;
  const double dy = rx.y - tx.y;
  const double baseline = std::hypot(dx, dy);
  if (!(range > baseline))
    throw std::domain_error("estimate_reflection_point: bistatic range not above the baseline");
  const double ux = std::cos(meas.aod_rad);
  const double uy = std::sin(meas.aod_rad);
  // r1 = (R^2 - B^2) / (2 (R - u.d)) with R - u.d = (R - B) + 2 B sin^2(phi / 2).
  const double excess = range - baseline;
  const double half = 0.5 * (meas.aod_rad - std::atan2(dy, dx));
  const double s = std::sin(half);
  const double r1 = excess * (range + baseline) / (2.0 * (excess + 2.0 * baseline * s * s));
  if (!(r1 > 0.0)) throw std::domain_error("estimate_reflection_point: degenerate geometry");
  return {tx.x + r1 * ux, tx.y + r1 * uy, tx.z};
}

Position3 estimate_center(std::span<const Position3> points) {
  if (points.empty()) throw ContractViolation("estimate_center: no points");
  Position3 c;
  for (const Position3& p : points) {
    c.x += p.x;
    c.y += p.y;
    c.z += p.z;
  }
  const auto n = static_cast<double>(points.size());
  return {c.x / n, c.y / n, c.z / n};
}

std::vector<double> gp_posterior_mean(std::span<const Position3> points,
                                      const Position3& center_hat, const GpParams& params,
                                      std::span<const double> thetas) {
  params.validate();
  const PolarData data = to_polar(points, center_hat);
  const auto n = static_cast<Eigen::Index>(data.theta.size());

  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = periodic_kernel(data.theta[i], data.theta[j], params);
  k.diagonal().array() += params.noise_std_m * params.noise_std_m;

  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    k.diagonal().array() += kCholeskyJitter;
    llt.compute(k);
    if (llt.info() != Eigen::Success)
      throw NumericalError("gp_fit_contour: covariance not positive definite after jitter");
  }
  const Eigen::VectorXd residual = data.radius.array() - data.prior_mean;
  const Eigen::VectorXd alpha = llt.solve(residual);

  std::vector<double> out;
  out.reserve(thetas.size());
  for (double t : thetas) {
    double mean = data.prior_mean;
    for (Eigen::Index i = 0; i < n; ++i) mean += periodic_kernel(t, data.theta[i], params) * alpha(i);
    out.push_back(std::max(mean, 0.0));
  }
  return out;
}

ContourEstimate gp_fit_contour(std::span<const Position3> points, const Position3& center_hat,
                               const GpParams& params) {
  params.validate();
  ContourEstimate est;
  est.center_hat = center_hat;
  est.theta_grid.resize(params.grid_points);
  for (std::size_t k = 0; k < params.grid_points; ++k)
    est.theta_grid[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(params.grid_points);
  est.radius_hat_m = gp_posterior_mean(points, center_hat, params, est.theta_grid);
  return est;
}

double ray_to_contour(const Position3& origin, double theta, const EllipseTarget& truth) {
  const Local o = to_local(truth, origin.x, origin.y);
  const Local d = rotate_to_local(truth, std::cos(theta), std::sin(theta));
  const double a2 = truth.semi_major_m * truth.semi_major_m;
  const double b2 = truth.semi_minor_m * truth.semi_minor_m;
  const double qa = d.x * d.x / a2 + d.y * d.y / b2;
  const double qb = 2.0 * (o.x * d.x / a2 + o.y * d.y / b2);
  const double qc = o.x * o.x / a2 + o.y * o.y / b2 - 1.0;
  const double disc = qb * qb - 4.0 * qa * qc;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (disc < 0.0) return nan;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
  double t1 = q / qa;
  double t2 = q != 0.0 ? qc / q : t1;
  if (t1 > t2) std::swap(t1, t2);
  if (t1 > 0.0) return t1;
  if (t2 > 0.0) return t2;
  return nan;
}

ContourError contour_error(const ContourEstimate& estimate, const EllipseTarget& truth) {
  if (estimate.theta_grid.size() != estimate.radius_hat_m.size() || estimate.theta_grid.empty())
    throw ContractViolation("contour_error: malformed estimate");
  ContourError err;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < estimate.theta_grid.size(); ++k) {
    const double r_true = ray_to_contour(estimate.center_hat, estimate.theta_grid[k], truth);
    if (std::isnan(r_true)) {
      ++err.excluded;
      continue;
    }
    const double e = std::abs(estimate.radius_hat_m[k] - r_true);
    sum += e;
    err.max_radial_err_m = std::max(err.max_radial_err_m, e);
    ++used;
  }
  if (2 * err.excluded > estimate.theta_grid.size())
    throw ContractViolation("contour_error: estimated center lies outside the target (" +
                            std::to_string(err.excluded) + " rays missed)");
  err.mean_radial_err_m = sum / static_cast<double>(used);
  return err;
}

ExtTargetRun run_ext_target(const ExtTargetConfig& config, std::uint64_t seed) {
  config.validate();
  ExtTargetRun run;
  run.ring = place_emts_ring(config.n_emts, config.target, config.ring_radius_m, seed,
                             config.jitter_rad);
  Rng rng = Rng::stream(seed, 1);
  for (NodeId t : run.ring.transmitters) {
    for (NodeId r : run.ring.receivers) {
      const Node& tx = run.ring.emts[t];
      const Node& rx = run.ring.emts[r];
      try {
        const Measurement m = simulate_measurement(tx, rx, config.target, config.noise, rng);
        const Position3 p = estimate_reflection_point(tx.pos, rx.pos, m);
        run.measurements.push_back(m);
        run.true_points.push_back(specular_point(tx.pos, rx.pos, config.target));
        run.reflection_points.push_back(p);
      } catch (const std::domain_error&) {
        ++run.rejected;
      }
    }
  }
  if (run.reflection_points.empty())
    throw ContractViolation("ext_target: every measurement was infeasible");

  const Position3 center = estimate_center(run.reflection_points);
  run.contour = gp_fit_contour(run.reflection_points, center, config.gp);
  run.error = contour_error(run.contour, config.target);
  run.center_error_m = std::hypot(center.x - config.target.center.x,
                                  center.y - config.target.center.y);
  double sum = 0.0;
  for (double t : run.contour.theta_grid) sum += config.target.radius_at(t);
  run.mean_true_radius_m = sum / static_cast<double>(run.contour.theta_grid.size());
  return run;
}

void write_contour_csv(std::ostream& os, const ExtTargetRun& run, const EllipseTarget& truth) {
  os << "theta_rad,radius_hat_m,radius_true_m\n";
  for (std::size_t k = 0; k < run.contour.theta_grid.size(); ++k) {
    const double t = run.contour.theta_grid[k];
    os << format_double(t) << ',' << format_double(run.contour.radius_hat_m[k]) << ','
       << format_double(ray_to_contour(run.contour.center_hat, t, truth)) << '\n';
  }
}

}  // namespace lawn
