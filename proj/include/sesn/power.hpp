#ifndef SESN_POWER_HPP
#define SESN_POWER_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "sesn/errors.hpp"

namespace sesn {

/// Manufacturer power curve with the three critical speeds that split it
/// into four zones: no rotation below cut-in, ramp up to rated, constant
/// rated output up to cut-out, shutdown above.
struct PowerCurve {
  double cut_in = 3.0;        // m/s
  double rated_speed = 12.0;  // m/s
  double cut_out = 25.0;      // m/s
  double rated_power = 3000.0;  // kW
  std::vector<std::pair<double, double>> points;  // (speed, kW) on [cut_in, rated_speed]

  void validate() const {
    if (!(0.0 < cut_in && cut_in < rated_speed && rated_speed < cut_out))
      throw configuration_error("power curve: need 0 < cut_in < rated < cut_out");
    if (!(rated_power > 0.0)) throw configuration_error("power curve: rated power must be > 0");
    double prev_s = cut_in, prev_p = 0.0;
    for (const auto& [s, p] : points) {
      if (s < cut_in || s > rated_speed)
        throw configuration_error("power curve: point speed outside [cut_in, rated]");
      if (s <= prev_s && !(s == cut_in && prev_s == cut_in))
        throw configuration_error("power curve: point speeds must increase");
      if (p < prev_p || p > rated_power)
        throw configuration_error("power curve: point powers must be nondecreasing in "
                                  "[0, rated_power]");
      prev_s = s;
      prev_p = p;
    }
  }

  /// Nodes used for zone-2 interpolation: the supplied points, closed with
  /// (cut_in, 0) and (rated_speed, rated_power) when absent.
  std::vector<std::pair<double, double>> interpolation_nodes() const {
    std::vector<std::pair<double, double>> nodes = points;
    if (nodes.empty() || nodes.front().first > cut_in) nodes.insert(nodes.begin(), {cut_in, 0.0});
    if (nodes.back().first < rated_speed) nodes.emplace_back(rated_speed, rated_power);
    return nodes;
  }
};

struct TurbineSite {
  std::string location_id;
  double hub_height = 80.0;  // m
  double alpha = 1.0 / 7.0;  // shear exponent; 1/7 over open land
  PowerCurve curve;

  void validate() const {
    if (!(hub_height > 10.0))
      throw configuration_error("turbine: hub height must exceed the 10 m reference");
    if (!std::isfinite(alpha)) throw configuration_error("turbine: alpha must be finite");
    curve.validate();
  }
};

/// Wind power law Z^(h) = Z (h/10)^alpha from the 10 m reference height.
inline double to_hub_height(double speed_10m, double hub_height, double alpha) {
  if (speed_10m < 0.0) throw domain_error("to_hub_height: negative wind speed");
  if (!(hub_height > 0.0)) throw domain_error("to_hub_height: height must be > 0");
  return speed_10m * std::pow(hub_height / 10.0, alpha);
}

/// Four-zone power transform: zero below cut-in and above cut-out, rated
/// on [rated, cut_out], piecewise linear between the curve points on
/// [cut_in, rated).
inline double to_power(double speed_hub, const PowerCurve& curve) {
  if (speed_hub < 0.0) throw domain_error("to_power: negative wind speed");
  if (speed_hub < curve.cut_in || speed_hub > curve.cut_out) return 0.0;
  if (speed_hub >= curve.rated_speed) return curve.rated_power;
  const auto nodes = curve.interpolation_nodes();
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (speed_hub <= nodes[i].first) {
      const auto& [s0, p0] = nodes[i - 1];
      const auto& [s1, p1] = nodes[i];
      const double t = (speed_hub - s0) / (s1 - s0);
      return p0 + t * (p1 - p0);
    }
  }
  return curve.rated_power;
}

/// Accumulated absolute energy difference sum_t |forecast - truth| * step.
inline double energy_error(const Eigen::VectorXd& true_power,
                           const Eigen::VectorXd& forecast_power, double step_hours = 1.0) {
  if (true_power.size() != forecast_power.size())
    throw schema_error("energy_error: series lengths differ");
  return (forecast_power - true_power).cwiseAbs().sum() * step_hours;
}

/// Pushes each quantile-level wind-speed forecast through the height and
/// power transforms and accumulates its energy error against the truth.
/// Returns one (level, kWh) pair per supplied level.
inline std::vector<std::pair<double, double>> quantile_energy_error(
    const Eigen::VectorXd& truth_speed_10m,
    const std::vector<std::pair<double, Eigen::VectorXd>>& quantile_speeds_10m,
    const TurbineSite& site, double step_hours = 1.0) {
  site.validate();
  Eigen::VectorXd truth_power(truth_speed_10m.size());
  for (Eigen::Index t = 0; t < truth_speed_10m.size(); ++t)
    truth_power(t) =
        to_power(to_hub_height(truth_speed_10m(t), site.hub_height, site.alpha), site.curve);

  std::vector<std::pair<double, double>> out;
  out.reserve(quantile_speeds_10m.size());
  for (const auto& [level, speeds] : quantile_speeds_10m) {
    if (speeds.size() != truth_speed_10m.size())
      throw schema_error("quantile_energy_error: series lengths differ at level " +
                         std::to_string(level));
    Eigen::VectorXd power(speeds.size());
    for (Eigen::Index t = 0; t < speeds.size(); ++t)
      power(t) = to_power(to_hub_height(std::max(speeds(t), 0.0), site.hub_height, site.alpha),
                          site.curve);
    out.emplace_back(level, energy_error(truth_power, power, step_hours));
  }
  return out;
}

}  // namespace sesn

#endif  // SESN_POWER_HPP
