#ifndef SESN_COVARIANCE_HPP
#define SESN_COVARIANCE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "sesn/errors.hpp"
#include "sesn/matern.hpp"
#include "sesn/nelder_mead.hpp"
#include "sesn/parallel.hpp"
#include "sesn/rng.hpp"
#include "sesn/space_time_field.hpp"

namespace sesn {

/// One mixture component of the nonstationary Matern model: a stationary
/// anisotropic Matern parameter set anchored at a center location.
struct CovarianceComponent {
  double cx = 0.0, cy = 0.0;   // center, degrees
  double sill = 1.0;           // partial sill sigma^2
  double smoothness = 0.5;     // nu
  Eigen::Matrix2d kernel = Eigen::Matrix2d::Identity();  // anisotropy Sigma
  double nugget = 0.0;         // tau^2
  bool converged = true;       // local fit diagnostic
};

/// Nonstationary Matern covariance: parameter fields are normalized
/// Gaussian-kernel mixtures of the component values, and the covariance of
/// a pair combines the locally averaged kernels through the mobility
/// prefactor |Sigma(s)|^1/4 |Sigma(s')|^1/4 |(Sigma(s)+Sigma(s'))/2|^-1/2.
struct CovarianceModel {
  std::vector<CovarianceComponent> components;
  double bandwidth = 3.0;  // Gaussian mixing bandwidth, degrees

  void validate() const {
    if (components.empty())
      throw configuration_error("covariance model has no components");
    if (!(bandwidth > 0.0))
      throw configuration_error("covariance mixing bandwidth must be > 0");
    for (const auto& c : components) {
      if (!(c.sill > 0.0)) throw domain_error("component partial sill must be > 0");
      if (!(c.smoothness > 0.0)) throw domain_error("component smoothness must be > 0");
      if (c.nugget < 0.0) throw domain_error("component nugget must be >= 0");
      const double det = c.kernel(0, 0) * c.kernel(1, 1) - c.kernel(0, 1) * c.kernel(1, 0);
      if (!(det > 0.0) || !(c.kernel(0, 0) > 0.0) ||
          std::abs(c.kernel(0, 1) - c.kernel(1, 0)) > 1e-12)
        throw domain_error("component anisotropy matrix must be symmetric positive definite");
    }
  }
};

/// Kernel-mixed parameters at a single point.
struct LocalParams {
  double sill = 0.0;       // sigma^2(s)
  double smoothness = 0.0; // nu(s)
  double nugget = 0.0;     // tau^2(s)
  Eigen::Matrix2d kernel = Eigen::Matrix2d::Zero();  // Sigma(s)
};

/// Mixes (sigma^2, nu, tau^2, Sigma) over components with normalized
/// Gaussian weights exp(-d^2 / (2 bw^2)).
inline LocalParams local_params(double x, double y, const CovarianceModel& model) {
  LocalParams p;
  double wsum = 0.0;
  const double inv2bw2 = 1.0 / (2.0 * model.bandwidth * model.bandwidth);
  for (const auto& c : model.components) {
    const double dx = x - c.cx, dy = y - c.cy;
    const double w = std::exp(-(dx * dx + dy * dy) * inv2bw2);
    wsum += w;
    p.sill += w * c.sill;
    p.smoothness += w * c.smoothness;
    p.nugget += w * c.nugget;
    p.kernel += w * c.kernel;
  }
  if (!(wsum > 0.0)) {
    // every weight underflowed; the normalized mixture degenerates to the
    // nearest component
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < model.components.size(); ++i) {
      const double dx = x - model.components[i].cx, dy = y - model.components[i].cy;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        nearest = i;
      }
    }
    const auto& c = model.components[nearest];
    return {c.sill, c.smoothness, c.nugget, c.kernel};
  }
  p.sill /= wsum;
  p.smoothness /= wsum;
  p.nugget /= wsum;
  p.kernel /= wsum;
  return p;
}

namespace detail {

inline double det2(const Eigen::Matrix2d& m) {
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

/// Covariance of a pair from precomputed local parameters.
inline double pair_covariance(const Location& a, const LocalParams& pa, const Location& b,
                              const LocalParams& pb) {
  const bool coincident = same_coords(a, b);
  const Eigen::Matrix2d avg = 0.5 * (pa.kernel + pb.kernel);
  const double det_a = det2(pa.kernel), det_b = det2(pb.kernel), det_avg = det2(avg);
  if (!(det_avg > 0.0) || !(det_a > 0.0) || !(det_b > 0.0))
    throw numeric_error("covariance: degenerate averaged kernel for pair (" + a.id +
                        ", " + b.id + ")");
  const double prefactor =
      std::pow(det_a, 0.25) * std::pow(det_b, 0.25) / std::sqrt(det_avg);
  const Eigen::Vector2d h(a.x - b.x, a.y - b.y);
  const double nu = 0.5 * (pa.smoothness + pb.smoothness);
  const double corr = prefactor * matern_stationary(h, avg, nu);
  double cov = std::sqrt(pa.sill) * std::sqrt(pb.sill) * corr;
  if (coincident) cov += pa.nugget;
  return cov;
}

}  // namespace detail

/// C(s, s') of the nonstationary Matern model. The nugget enters only for
/// coincident coordinates.
inline double covariance(const Location& a, const Location& b, const CovarianceModel& model) {
  const LocalParams pa = local_params(a.x, a.y, model);
  const LocalParams pb = local_params(b.x, b.y, model);
  return detail::pair_covariance(a, pa, b, pb);
}

/// Covariance matrix over a location list (local parameters evaluated once
/// per point, pairs filled symmetrically).
inline Eigen::MatrixXd covariance_matrix(const std::vector<Location>& locs,
                                         const CovarianceModel& model) {
  const std::size_t n = locs.size();
  std::vector<LocalParams> params(n);
  for (std::size_t i = 0; i < n; ++i) params[i] = local_params(locs[i].x, locs[i].y, model);
  Eigen::MatrixXd K(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double c = detail::pair_covariance(locs[i], params[i], locs[j], params[j]);
      K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
      K(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = c;
    }
  }
  return K;
}

/// Cross-covariance matrix, rows over `rows`, columns over `cols`.
inline Eigen::MatrixXd cross_covariance_matrix(const std::vector<Location>& rows,
                                               const std::vector<Location>& cols,
                                               const CovarianceModel& model) {
  std::vector<LocalParams> pr(rows.size()), pc(cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    pr[i] = local_params(rows[i].x, rows[i].y, model);
  for (std::size_t j = 0; j < cols.size(); ++j)
    pc[j] = local_params(cols[j].x, cols[j].y, model);
  Eigen::MatrixXd K(rows.size(), cols.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < cols.size(); ++j)
      K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          detail::pair_covariance(rows[i], pr[i], cols[j], pc[j]);
  });
  return K;
}

struct CovarianceFitOptions {
  double nu_min = 0.05, nu_max = 10.0;  // smoothness clamp during optimization
  int restarts = 3;
  int max_iter = 400;
  std::uint64_t seed = 1;
  std::size_t min_neighbors = 30;
};

namespace detail {

struct LocalFit {
  double sill, smoothness, nugget;
  Eigen::Matrix2d kernel;
  bool converged;  // simplex reached its tolerance
  bool usable;     // objective was finite at the returned point
};

/// Negative log-likelihood of zero-mean Gaussian replicates under a
/// stationary anisotropic Matern + nugget model (constant dropped).
inline double local_neg_loglik(const Eigen::MatrixXd& y,  // T x n replicates
                               const std::vector<Location>& locs, double sill, double nu,
                               const Eigen::Matrix2d& sigma, double nugget) {
  const Eigen::Index n = y.cols(), T = y.rows();
  Eigen::MatrixXd C(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    C(i, i) = sill + nugget;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::Vector2d h(locs[i].x - locs[j].x, locs[i].y - locs[j].y);
      const double c = sill * matern_stationary(h, sigma, nu);
      C(i, j) = c;
      C(j, i) = c;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  const Eigen::MatrixXd solved = llt.solve(y.transpose());  // n x T
  const double quad = (y.transpose().array() * solved.array()).sum();
  return 0.5 * (static_cast<double>(T) * logdet + quad);
}

inline LocalFit fit_local(const Eigen::MatrixXd& y, const std::vector<Location>& locs,
                          const CovarianceFitOptions& opt, std::uint64_t seed) {
  // theta = (log sill, logit-ish nu, log L11, L21, log L22, log nugget),
  // Sigma = L L' keeps the kernel positive definite.
  const double nu_lo = std::log(opt.nu_min), nu_hi = std::log(opt.nu_max);
  auto unpack = [&](const Eigen::VectorXd& th, double& sill, double& nu,
                    Eigen::Matrix2d& sigma, double& nugget) {
    sill = std::exp(th(0));
    nu = std::exp(std::clamp(th(1), nu_lo, nu_hi));
    const double l11 = std::exp(std::clamp(th(2), -12.0, 6.0));
    const double l21 = std::clamp(th(3), -100.0, 100.0);
    const double l22 = std::exp(std::clamp(th(4), -12.0, 6.0));
    sigma(0, 0) = l11 * l11;
    sigma(0, 1) = l11 * l21;
    sigma(1, 0) = l11 * l21;
    sigma(1, 1) = l21 * l21 + l22 * l22;
    nugget = std::exp(th(5));
  };
  auto objective = [&](const Eigen::VectorXd& th) -> double {
    if (!th.allFinite()) return std::numeric_limits<double>::infinity();
    double sill, nu, nugget;
    Eigen::Matrix2d sigma;
    unpack(th, sill, nu, sigma, nugget);
    if (!(sill > 1e-10) || sill > 1e6 || nugget > 1e6) return std::numeric_limits<double>::infinity();
    return local_neg_loglik(y, locs, sill, nu, sigma, nugget);
  };

  // moment-based start: marginal variance split between sill and nugget,
  // kernel scale from the median pairwise distance
  const double var0 = std::max(y.array().square().mean(), 1e-6);
  std::vector<double> d2s;
  for (std::size_t i = 0; i < locs.size(); ++i)
    for (std::size_t j = i + 1; j < locs.size(); ++j) {
      const double dx = locs[i].x - locs[j].x, dy = locs[i].y - locs[j].y;
      d2s.push_back(dx * dx + dy * dy);
    }
  std::nth_element(d2s.begin(), d2s.begin() + d2s.size() / 2, d2s.end());
  const double med = std::sqrt(std::max(d2s[d2s.size() / 2], 1e-8));

  Eigen::VectorXd th0(6);
  th0 << std::log(0.9 * var0), std::log(0.8), std::log(0.5 * med), 0.0,
      std::log(0.5 * med), std::log(0.1 * var0);

  Rng rng(seed);
  NelderMeadResult best;
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    Eigen::VectorXd start = th0;
    if (r > 0)
      for (Eigen::Index k = 0; k < start.size(); ++k) start(k) += rng.uniform(-1.0, 1.0);
    const auto res = nelder_mead(objective, start, 0.4, 1e-8, opt.max_iter);
    if (res.value < best.value) best = res;
  }

  LocalFit fit;
  unpack(best.x, fit.sill, fit.smoothness, fit.kernel, fit.nugget);
  fit.usable = std::isfinite(best.value);
  fit.converged = best.converged && fit.usable;
  return fit;
}

}  // namespace detail

/// Local maximum-likelihood fit of the mixture components: at each center,
/// the stationary anisotropic Matern likelihood is maximized over the
/// locations within `radius`, pooling time points as independent
/// replicates. Centers whose optimizer fails to converge fall back to the
/// average of the converged neighbors.
inline CovarianceModel fit_covariance(const SpaceTimeField& residuals,
                                      const std::vector<Location>& centers, double radius,
                                      double bandwidth,
                                      const CovarianceFitOptions& opt = {}) {
  if (centers.empty()) throw configuration_error("fit_covariance: no centers supplied");
  if (!(radius > 0.0) || !(bandwidth > 0.0))
    throw configuration_error("fit_covariance: radius and bandwidth must be > 0");
  if (!residuals.all_finite())
    throw invalid_data_error("fit_covariance: residual field contains non-finite values");

  CovarianceModel model;
  model.bandwidth = bandwidth;
  model.components.resize(centers.size());

  std::vector<std::vector<Eigen::Index>> neighborhoods(centers.size());
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (Eigen::Index j = 0; j < residuals.n_locations(); ++j) {
      const auto& loc = residuals.locations[static_cast<std::size_t>(j)];
      const double dx = loc.x - centers[c].x, dy = loc.y - centers[c].y;
      if (dx * dx + dy * dy <= radius * radius) neighborhoods[c].push_back(j);
    }
    if (neighborhoods[c].size() < opt.min_neighbors)
      throw configuration_error("fit_covariance: center '" + centers[c].id + "' has only " +
                                std::to_string(neighborhoods[c].size()) +
                                " locations within radius " + std::to_string(radius) +
                                " (needs >= " + std::to_string(opt.min_neighbors) + ")");
  }

  std::vector<bool> usable(centers.size(), false);
  parallel_for(centers.size(), [&](std::size_t c) {
    std::vector<Location> locs;
    Eigen::MatrixXd y(residuals.n_times(), static_cast<Eigen::Index>(neighborhoods[c].size()));
    for (std::size_t k = 0; k < neighborhoods[c].size(); ++k) {
      locs.push_back(residuals.locations[static_cast<std::size_t>(neighborhoods[c][k])]);
      y.col(static_cast<Eigen::Index>(k)) = residuals.values.col(neighborhoods[c][k]);
    }
    const auto fit = detail::fit_local(y, locs, opt, derive_seed(opt.seed, c));
    auto& comp = model.components[c];
    comp.cx = centers[c].x;
    comp.cy = centers[c].y;
    comp.sill = fit.sill;
    comp.smoothness = fit.smoothness;
    comp.kernel = fit.kernel;
    comp.nugget = fit.nugget;
    comp.converged = fit.converged;
    usable[c] = fit.usable;
  });

  // fallback: replace non-converged centers by the average of converged
  // ones; when nothing reached tolerance the usable estimates stand, with
  // their converged flags left false for the caller to warn about
  std::vector<std::size_t> good;
  for (std::size_t c = 0; c < model.components.size(); ++c)
    if (model.components[c].converged) good.push_back(c);
  if (good.empty()) {
    bool any_usable = false;
    for (std::size_t c = 0; c < centers.size(); ++c) any_usable |= usable[c];
    if (!any_usable)
      throw fit_failure_error("fit_covariance: every local likelihood was degenerate");
    model.validate();
    return model;
  }
  for (auto& comp : model.components) {
    if (comp.converged) continue;
    CovarianceComponent avg;
    avg.cx = comp.cx;
    avg.cy = comp.cy;
    avg.sill = avg.smoothness = avg.nugget = 0.0;
    avg.kernel.setZero();
    for (std::size_t g : good) {
      avg.sill += model.components[g].sill;
      avg.smoothness += model.components[g].smoothness;
      avg.nugget += model.components[g].nugget;
      avg.kernel += model.components[g].kernel;
    }
    const double inv = 1.0 / static_cast<double>(good.size());
    avg.sill *= inv;
    avg.smoothness *= inv;
    avg.nugget *= inv;
    avg.kernel *= inv;
    avg.converged = false;
    comp = avg;
  }

  model.validate();
  return model;
}

}  // namespace sesn

#endif  // SESN_COVARIANCE_HPP
