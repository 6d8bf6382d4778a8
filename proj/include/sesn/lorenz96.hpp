#ifndef SESN_LORENZ96_HPP
#define SESN_LORENZ96_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sesn/errors.hpp"
#include "sesn/rng.hpp"

namespace sesn {

/// Modified Lorenz 96 generator settings. eta scales the advection term
/// and controls how nonlinear the dynamics are (eta = 1 recovers the
/// classical system).
struct LorenzConfig {
  int n_sites = 5;
  double forcing = 8.0;
  double eta = 1.0;
  double dt = 0.1;            // observation spacing, model time units
  int n_steps = 1000;         // observations kept after burn-in
  int burn_in_steps = 2000;   // leading observations discarded
  int substeps = 10;          // internal RK4 steps per observation
  double noise_sd = 1.0;      // sd of the measurement noise
  std::uint64_t seed = 0;

  void validate() const {
    if (n_sites < 4)
      throw configuration_error("lorenz: the i-2 coupling needs at least 4 sites");
    if (!(dt > 0.0)) throw configuration_error("lorenz: dt must be > 0");
    if (noise_sd < 0.0) throw configuration_error("lorenz: noise_sd must be >= 0");
    if (n_steps < 1 || burn_in_steps < 0 || substeps < 1)
      throw configuration_error("lorenz: invalid step counts");
  }
};

/// dy_i/dt = eta (y_{i+1} - y_{i-2}) y_{i-1} - y_i + F with cyclic indices.
inline Eigen::VectorXd lorenz_derivative(const Eigen::VectorXd& y, double eta, double forcing) {
  const Eigen::Index n = y.size();
  if (n < 4) throw configuration_error("lorenz_derivative: need at least 4 sites");
  Eigen::VectorXd dy(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index ip1 = (i + 1) % n;
    const Eigen::Index im1 = (i - 1 + n) % n;
    const Eigen::Index im2 = (i - 2 + n) % n;
    dy(i) = eta * (y(ip1) - y(im2)) * y(im1) - y(i) + forcing;
  }
  return dy;
}

struct LorenzTrajectory {
  Eigen::MatrixXd truth;         // n_steps x n_sites, noiseless
  Eigen::MatrixXd observations;  // truth + white noise
};

/// Classical fourth-order Runge-Kutta from an iid standard normal start;
/// the burn-in is discarded and iid Gaussian noise is added to the kept
/// part. Deterministic in the seed.
inline LorenzTrajectory integrate(const LorenzConfig& config) {
  config.validate();
  Rng rng(config.seed);

  Eigen::VectorXd y(config.n_sites);
  for (int i = 0; i < config.n_sites; ++i) y(i) = rng.normal();

  const double h = config.dt / config.substeps;
  const int total = config.burn_in_steps + config.n_steps;

  LorenzTrajectory out;
  out.truth.resize(config.n_steps, config.n_sites);

  for (int step = 0; step < total; ++step) {
    for (int sub = 0; sub < config.substeps; ++sub) {
      const Eigen::VectorXd k1 = lorenz_derivative(y, config.eta, config.forcing);
      const Eigen::VectorXd k2 = lorenz_derivative(y + 0.5 * h * k1, config.eta, config.forcing);
      const Eigen::VectorXd k3 = lorenz_derivative(y + 0.5 * h * k2, config.eta, config.forcing);
      const Eigen::VectorXd k4 = lorenz_derivative(y + h * k3, config.eta, config.forcing);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!y.allFinite())
      throw integration_failure_error("lorenz: trajectory blew up at step " +
                                      std::to_string(step));
    if (step >= config.burn_in_steps) out.truth.row(step - config.burn_in_steps) = y.transpose();
  }

  out.observations = out.truth;
  if (config.noise_sd > 0.0)
    for (Eigen::Index r = 0; r < out.observations.rows(); ++r)
      for (Eigen::Index c = 0; c < out.observations.cols(); ++c)
        out.observations(r, c) += rng.normal(0.0, config.noise_sd);
  return out;
}

}  // namespace sesn

#endif  // SESN_LORENZ96_HPP
