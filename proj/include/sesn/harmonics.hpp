#ifndef SESN_HARMONICS_HPP
#define SESN_HARMONICS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "sesn/errors.hpp"
#include "sesn/parallel.hpp"
#include "sesn/space_time_field.hpp"

namespace sesn {

inline constexpr double kTwoPi = 6.28318530717958647692528677;

/// Default harmonic periods in hours: one year (365 days; leap days are
/// assumed removed upstream), half a year, one day, twelve hours, eight
/// hours.
inline std::vector<double> default_periods() { return {8760.0, 4380.0, 24.0, 12.0, 8.0}; }

/// Square-root harmonic regression fitted independently per location:
///   sqrt(Z_t) = b0 + sum_k b_{k,1} cos(2 pi t / T_k) + b_{k,2} sin(2 pi t / T_k)
///             + gamma * Y_t,
/// with gamma the residual standard deviation so Y has unit sample
/// variance at every location.
struct HarmonicModel {
  std::vector<double> periods;       // T_k, hours
  std::vector<Location> locations;
  Eigen::MatrixXd coefficients;      // (2K+1) x n:  b0, b11, b12, b21, b22, ...
  Eigen::VectorXd scale;             // gamma per location, > 0

  Eigen::Index n_harmonics() const { return static_cast<Eigen::Index>(periods.size()); }
  Eigen::Index n_locations() const { return coefficients.cols(); }

  /// Mean structure of sqrt(Z) at absolute time t for location column j.
  double mean_at(std::int64_t t, Eigen::Index j) const {
    double m = coefficients(0, j);
    for (Eigen::Index k = 0; k < n_harmonics(); ++k) {
      const double w = kTwoPi * static_cast<double>(t) / periods[static_cast<std::size_t>(k)];
      m += coefficients(1 + 2 * k, j) * std::cos(w) + coefficients(2 + 2 * k, j) * std::sin(w);
    }
    return m;
  }
};

/// One-sided amplitude spectrum of the centered series. Bin f carries
/// period = length / f and the energy of the conjugate pair, so the sum of
/// squared amplitudes equals the sum of squared centered values.
inline std::vector<std::pair<double, double>> periodogram(const Eigen::VectorXd& series) {
  const Eigen::Index n = series.size();
  if (n < 2) throw invalid_data_error("periodogram: need at least 2 samples");
  if (!series.allFinite()) throw invalid_data_error("periodogram: non-finite input");

  const Eigen::VectorXd x = series.array() - series.mean();
  const Eigen::Index half = n / 2;
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(half));
  for (Eigen::Index f = 1; f <= half; ++f) {
    double re = 0.0, im = 0.0;
    const double w = kTwoPi * static_cast<double>(f) / static_cast<double>(n);
    for (Eigen::Index t = 0; t < n; ++t) {
      re += x(t) * std::cos(w * static_cast<double>(t));
      im -= x(t) * std::sin(w * static_cast<double>(t));
    }
    const double power = re * re + im * im;
    // fold in the conjugate bin except at the Nyquist frequency of even n
    const bool nyquist = (2 * f == n);
    const double amp = std::sqrt((nyquist ? power : 2.0 * power) / static_cast<double>(n));
    out.emplace_back(static_cast<double>(n) / static_cast<double>(f), amp);
  }
  return out;
}

namespace detail {

inline Eigen::MatrixXd harmonic_design(std::int64_t start, Eigen::Index n_times,
                                       const std::vector<double>& periods) {
  Eigen::MatrixXd X(n_times, 1 + 2 * static_cast<Eigen::Index>(periods.size()));
  X.col(0).setOnes();
  for (std::size_t k = 0; k < periods.size(); ++k) {
    for (Eigen::Index r = 0; r < n_times; ++r) {
      const double w = kTwoPi * static_cast<double>(start + r) / periods[k];
      X(r, 1 + 2 * static_cast<Eigen::Index>(k)) = std::cos(w);
      X(r, 2 + 2 * static_cast<Eigen::Index>(k)) = std::sin(w);
    }
  }
  return X;
}

}  // namespace detail

inline HarmonicModel fit_harmonics(const SpaceTimeField& field,
                                   const std::vector<double>& periods) {
  field.validate();
  const Eigen::Index T = field.n_times(), n = field.n_locations();
  const Eigen::Index p = 1 + 2 * static_cast<Eigen::Index>(periods.size());
  if (T <= p)
    throw insufficient_data_error("fit_harmonics: " + std::to_string(T) +
                                  " times cannot identify " + std::to_string(p) +
                                  " coefficients");
  for (std::size_t a = 0; a < periods.size(); ++a) {
    if (!(periods[a] > 0.0))
      throw domain_error("fit_harmonics: periods must be positive");
    for (std::size_t b = a + 1; b < periods.size(); ++b)
      if (periods[a] == periods[b])
        throw domain_error("fit_harmonics: duplicate period " + std::to_string(periods[a]));
  }
  if (!field.all_finite())
    throw invalid_data_error("fit_harmonics: field contains non-finite values");
  if ((field.values.array() < 0.0).any())
    throw domain_error("fit_harmonics: negative field value; the square-root "
                       "transform needs nonnegative data");

  const Eigen::MatrixXd X = detail::harmonic_design(field.start, T, periods);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    // name the first period whose column pair the pivoting discarded
    const auto perm = qr.colsPermutation().indices();
    Eigen::Index culprit = perm(qr.rank());  // original column index
    const std::size_t k = culprit == 0 ? 0 : static_cast<std::size_t>((culprit - 1) / 2);
    throw singular_design_error("fit_harmonics: period " + std::to_string(periods[k]) +
                                " h makes the regression design rank-deficient over this " +
                                std::to_string(T) + "-hour record");
  }

  HarmonicModel model;
  model.periods = periods;
  model.locations = field.locations;
  model.coefficients.resize(p, n);
  model.scale.resize(n);

  const Eigen::MatrixXd sqrt_values = field.values.array().sqrt();
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    const Eigen::Index jj = static_cast<Eigen::Index>(j);
    const Eigen::VectorXd beta = qr.solve(sqrt_values.col(jj));
    const Eigen::VectorXd resid = sqrt_values.col(jj) - X * beta;
    // unbiased standard deviation; intercept makes the residual mean zero
    const double sd = std::sqrt(resid.squaredNorm() / static_cast<double>(T - 1));
    model.coefficients.col(jj) = beta;
    model.scale(jj) = std::max(sd, 1e-300);
  });
  return model;
}

/// Y_t = (sqrt(Z_t) - mean structure) / gamma, per location.
inline SpaceTimeField detrend(const SpaceTimeField& field, const HarmonicModel& model) {
  field.validate();
  if (field.n_locations() != model.n_locations())
    throw schema_error("detrend: field and model disagree on location count");
  for (Eigen::Index j = 0; j < field.n_locations(); ++j)
    if (field.locations[static_cast<std::size_t>(j)].id !=
        model.locations[static_cast<std::size_t>(j)].id)
      throw schema_error("detrend: location mismatch at column " + std::to_string(j));
  if ((field.values.array() < 0.0).any())
    throw domain_error("detrend: negative field value");

  const Eigen::MatrixXd X = detail::harmonic_design(field.start, field.n_times(), model.periods);
  SpaceTimeField out;
  out.locations = field.locations;
  out.start = field.start;
  out.values = (field.values.array().sqrt().matrix() - X * model.coefficients).array().rowwise() /
               model.scale.transpose().array();
  return out;
}

struct RetrendResult {
  SpaceTimeField field;
  std::size_t truncated = 0;  // entries clipped at zero before squaring
};

/// Z_t = (mean structure + gamma Y_t)^2. Negative pre-square values cannot
/// be wind speeds, so they are clipped to zero and counted.
inline RetrendResult retrend(const SpaceTimeField& residuals, const HarmonicModel& model) {
  residuals.validate();
  if (residuals.n_locations() != model.n_locations())
    throw schema_error("retrend: residuals and model disagree on location count");

  const Eigen::MatrixXd X =
      detail::harmonic_design(residuals.start, residuals.n_times(), model.periods);
  Eigen::MatrixXd pre = X * model.coefficients +
                        (residuals.values.array().rowwise() * model.scale.transpose().array())
                            .matrix();
  RetrendResult out;
  out.truncated = static_cast<std::size_t>((pre.array() < 0.0).count());
  pre = pre.array().max(0.0);
  out.field.locations = residuals.locations;
  out.field.start = residuals.start;
  out.field.values = pre.array().square();
  return out;
}

}  // namespace sesn

#endif  // SESN_HARMONICS_HPP
