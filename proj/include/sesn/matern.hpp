#ifndef SESN_MATERN_HPP
#define SESN_MATERN_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "sesn/bessel.hpp"
#include "sesn/errors.hpp"

namespace sesn {

/// Stationary Matern correlation at scaled distance q >= 0,
///   R(q) = 2^(1-nu) / Gamma(nu) * q^nu * K_nu(q),  R(0) = 1.
inline double matern_correlation(double q, double nu) {
  if (!(nu > 0.0))
    throw domain_error("matern_correlation: smoothness must be > 0, got " +
                       std::to_string(nu));
  if (q < 0.0) throw domain_error("matern_correlation: negative distance");
  if (q > 600.0) return 0.0;  // below double underflow of exp(-q) scale
  if (q < 1e-12) {
    if (nu >= 1.0) return 1.0;
    // small-q expansion 1 - Gamma(1-nu)/Gamma(1+nu) (q/2)^(2 nu) dominates
    return 1.0 - std::tgamma(1.0 - nu) / std::tgamma(1.0 + nu) *
                     std::pow(0.5 * q, 2.0 * nu);
  }
  return std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(q, nu) * bessel_k(nu, q);
}

/// Anisotropic stationary Matern correlation R^S(h; Sigma, nu) with
/// q = sqrt(h' Sigma^-1 h). Sigma must be symmetric positive definite.
inline double matern_stationary(const Eigen::Vector2d& h, const Eigen::Matrix2d& sigma,
                                double nu) {
  const double det = sigma(0, 0) * sigma(1, 1) - sigma(0, 1) * sigma(1, 0);
  if (!(det > 0.0) || !(sigma(0, 0) > 0.0))
    throw domain_error("matern_stationary: kernel matrix is not positive definite");
  // closed-form 2x2 inverse quadratic form
  const double q2 =
      (h(0) * (sigma(1, 1) * h(0) - sigma(0, 1) * h(1)) +
       h(1) * (sigma(0, 0) * h(1) - sigma(1, 0) * h(0))) /
      det;
  const double q = std::sqrt(std::max(q2, 0.0));
  return matern_correlation(q, nu);
}

}  // namespace sesn

#endif  // SESN_MATERN_HPP
