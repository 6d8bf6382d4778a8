#ifndef SESN_KRIGING_HPP
#define SESN_KRIGING_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "sesn/covariance.hpp"
#include "sesn/errors.hpp"

namespace sesn {

/// Simple-kriging weight matrix K^f K^-1: applying it to a residual vector
/// observed at the knots yields the zero-mean best linear prediction at
/// every target location.
struct KrigingWeights {
  Eigen::MatrixXd weights;  // n_targets x n_knots

  Eigen::VectorXd apply(const Eigen::VectorXd& knot_values) const {
    return weights * knot_values;
  }

  /// Row-wise application to a (time x knot) block of forecasts.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& knot_series) const {
    return knot_series * weights.transpose();
  }
};

inline KrigingWeights kriging_weights(const std::vector<Location>& targets,
                                      const std::vector<Location>& knots,
                                      const CovarianceModel& model) {
  if (knots.empty()) throw configuration_error("kriging_weights: no knots");
  model.validate();

  // coincident knots without a nugget make K rank-deficient no matter how
  // much jitter is retried
  for (std::size_t i = 0; i < knots.size(); ++i)
    for (std::size_t j = i + 1; j < knots.size(); ++j)
      if (same_coords(knots[i], knots[j]) &&
          local_params(knots[i].x, knots[i].y, model).nugget < 1e-300)
        throw numeric_error("kriging_weights: knot covariance is singular; knots '" +
                            knots[i].id + "' and '" + knots[j].id +
                            "' share the same coordinates and the nugget is zero");

  Eigen::MatrixXd K = covariance_matrix(knots, model);
  const Eigen::MatrixXd Kf = cross_covariance_matrix(targets, knots, model);

  // Cholesky with escalating jitter; K is symmetric so the weight transpose
  // solves in place.
  const double scale = K.diagonal().maxCoeff();
  double jitter = 0.0;
  for (int attempt = 0;; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(K + jitter * Eigen::MatrixXd::Identity(K.rows(), K.cols()));
    if (llt.info() == Eigen::Success) {
      KrigingWeights out;
      out.weights = llt.solve(Kf.transpose()).transpose();
      return out;
    }
    if (attempt >= 8) break;
    jitter = (jitter == 0.0) ? 1e-12 * scale : jitter * 10.0;
  }

  // identify the most suspicious pair for the error message
  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < knots.size(); ++i)
    for (std::size_t j = i + 1; j < knots.size(); ++j) {
      const double dx = knots[i].x - knots[j].x, dy = knots[i].y - knots[j].y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        bi = i;
        bj = j;
      }
    }
  throw numeric_error("kriging_weights: knot covariance is numerically singular; "
                      "nearest knot pair is ('" +
                      knots[bi].id + "', '" + knots[bj].id + "') at distance " +
                      std::to_string(std::sqrt(best)) + " degrees");
}

}  // namespace sesn

#endif  // SESN_KRIGING_HPP
