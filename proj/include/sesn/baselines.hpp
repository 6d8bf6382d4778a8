#ifndef SESN_BASELINES_HPP
#define SESN_BASELINES_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <vector>

#include "sesn/errors.hpp"
#include "sesn/nelder_mead.hpp"

namespace sesn {

// ---------------------------------------------------------------------------
// persistence

/// Last observed value at every horizon.
inline Eigen::MatrixXd persistence_forecast(const Eigen::MatrixXd& history, int horizons) {
  if (history.rows() == 0) throw insufficient_history_error("persistence: empty history");
  Eigen::MatrixXd out(horizons, history.cols());
  for (int h = 0; h < horizons; ++h) out.row(h) = history.row(history.rows() - 1);
  return out;
}

// ---------------------------------------------------------------------------
// ARIMA

/// ARIMA(p, d, q) for one site. The constant is carried only for d = 0, so
/// ARIMA(0,1,0) reduces exactly to persistence.
struct ArimaModel {
  int p = 0, d = 0, q = 0;
  double c = 0.0;
  Eigen::VectorXd ar;      // psi_1..psi_p
  Eigen::VectorXd ma;      // theta_1..theta_q
  double sigma2 = 0.0;
};

namespace detail {

inline Eigen::VectorXd difference(const Eigen::VectorXd& y, int d) {
  Eigen::VectorXd w = y;
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd next(w.size() - 1);
    for (Eigen::Index t = 1; t < w.size(); ++t) next(t - 1) = w(t) - w(t - 1);
    w = next;
  }
  return w;
}

/// Conditional residual recursion: e_t = w_t - c - sum psi_i w_{t-i} -
/// sum theta_j e_{t-j}, conditioning on the first p observations and zero
/// pre-sample errors.
inline Eigen::VectorXd css_residuals(const Eigen::VectorXd& w, double c,
                                     const Eigen::VectorXd& ar, const Eigen::VectorXd& ma) {
  const Eigen::Index n = w.size();
  const int p = static_cast<int>(ar.size()), q = static_cast<int>(ma.size());
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (Eigen::Index t = p; t < n; ++t) {
    double pred = c;
    for (int i = 1; i <= p; ++i) pred += ar(i - 1) * w(t - i);
    for (int j = 1; j <= q; ++j)
      if (t - j >= p) pred += ma(j - 1) * e(t - j);
    e(t) = w(t) - pred;
  }
  return e;
}

inline double css_objective(const Eigen::VectorXd& w, double c, const Eigen::VectorXd& ar,
                            const Eigen::VectorXd& ma) {
  const Eigen::VectorXd e = css_residuals(w, c, ar, ma);
  const int p = static_cast<int>(ar.size());
  return e.tail(e.size() - p).squaredNorm();
}

/// Smallest root modulus of P(z) = 1 + s a_1 z + ... + s a_k z^k. The
/// reciprocals of the roots of P are the eigenvalues of the companion
/// matrix of Q(z) = z^k + s a_1 z^{k-1} + ... + s a_k. Returns +inf for
/// the empty or zero polynomial.
inline double min_root_modulus(const Eigen::VectorXd& coeffs, double sign) {
  Eigen::Index k = coeffs.size();
  while (k > 0 && std::abs(coeffs(k - 1)) < 1e-12) --k;
  if (k == 0) return std::numeric_limits<double>::infinity();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 1; i < k; ++i) q(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < k; ++i) q(0, i) = -sign * coeffs(i);
  Eigen::EigenSolver<Eigen::MatrixXd> es(q, false);
  double max_mod = 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    max_mod = std::max(max_mod, std::abs(es.eigenvalues()(i)));
  return max_mod < 1e-300 ? std::numeric_limits<double>::infinity() : 1.0 / max_mod;
}

/// Scales coefficients a_k <- a_k s^k until every root modulus exceeds 1,
/// which moves each root z to z/s.
inline bool project_outside_unit_circle(Eigen::VectorXd& coeffs, double sign) {
  for (int round = 0; round < 200; ++round) {
    if (min_root_modulus(coeffs, sign) > 1.0 + 1e-9) return true;
    double s = 0.95;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i)
      coeffs(i) *= std::pow(s, static_cast<double>(i + 1));
  }
  return false;
}

}  // namespace detail

/// Hannan-Rissanen two-stage least squares followed by a conditional
/// sum-of-squares refinement. Non-causal AR estimates are projected back
/// into the causal region (and MA estimates into the invertible region).
inline ArimaModel fit_arima(const Eigen::VectorXd& series, int p, int d, int q) {
  if (p < 0 || q < 0 || d < 0 || d > 2)
    throw configuration_error("fit_arima: need p, q >= 0 and d in {0, 1, 2}");
  if (series.size() < 10 * (p + q + 1))
    throw insufficient_data_error("fit_arima: series of length " +
                                  std::to_string(series.size()) + " is too short for (" +
                                  std::to_string(p) + "," + std::to_string(d) + "," +
                                  std::to_string(q) + ")");
  if (!series.allFinite()) throw invalid_data_error("fit_arima: non-finite values");

  const Eigen::VectorXd w = detail::difference(series, d);
  const Eigen::Index n = w.size();
  const bool with_const = (d == 0);

  ArimaModel model;
  model.p = p;
  model.d = d;
  model.q = q;

  if (p == 0 && q == 0) {
    model.c = with_const ? w.mean() : 0.0;
    model.sigma2 = (w.array() - model.c).square().sum() / std::max<double>(1.0, n - 1);
    return model;
  }

  // stage 1: long autoregression for residual estimates
  Eigen::VectorXd ehat = Eigen::VectorXd::Zero(n);
  int L = 0;
  if (q > 0) {
    L = std::min<int>(static_cast<int>(n) / 4, std::max(10, 2 * (p + q)));
    const Eigen::Index rows = n - L;
    Eigen::MatrixXd X(rows, L + 1);
    X.col(0).setOnes();
    for (int i = 1; i <= L; ++i)
      for (Eigen::Index t = 0; t < rows; ++t) X(t, i) = w(t + L - i);
    const Eigen::VectorXd targets = w.tail(rows);
    const Eigen::VectorXd a = X.colPivHouseholderQr().solve(targets);
    for (Eigen::Index t = L; t < n; ++t) {
      double pred = a(0);
      for (int i = 1; i <= L; ++i) pred += a(i) * w(t - i);
      ehat(t) = w(t) - pred;
    }
  }

  // stage 2: regress on lagged values and lagged residual estimates
  const Eigen::Index t0 = std::max<Eigen::Index>(p, L + q);
  const Eigen::Index rows = n - t0;
  if (rows < p + q + 2)
    throw insufficient_data_error("fit_arima: too few usable rows after lagging");
  const int ncol = (with_const ? 1 : 0) + p + q;
  Eigen::MatrixXd X(rows, ncol);
  Eigen::VectorXd targets(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index t = t0 + r;
    int col = 0;
    if (with_const) X(r, col++) = 1.0;
    for (int i = 1; i <= p; ++i) X(r, col++) = w(t - i);
    for (int j = 1; j <= q; ++j) X(r, col++) = ehat(t - j);
    targets(r) = w(t);
  }
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(targets);
  int col = 0;
  model.c = with_const ? beta(col++) : 0.0;
  model.ar.resize(p);
  for (int i = 0; i < p; ++i) model.ar(i) = beta(col++);
  model.ma.resize(q);
  for (int j = 0; j < q; ++j) model.ma(j) = beta(col++);

  if (!detail::project_outside_unit_circle(model.ar, -1.0))
    throw fit_failure_error("fit_arima: could not reach a causal AR polynomial");
  detail::project_outside_unit_circle(model.ma, 1.0);

  // CSS refinement (the stage-2 solution is already exact when q = 0)
  if (q > 0) {
    const int dim = (with_const ? 1 : 0) + p + q;
    Eigen::VectorXd th(dim);
    int k = 0;
    if (with_const) th(k++) = model.c;
    for (int i = 0; i < p; ++i) th(k++) = model.ar(i);
    for (int j = 0; j < q; ++j) th(k++) = model.ma(j);
    auto unpack = [&](const Eigen::VectorXd& v, double& c, Eigen::VectorXd& ar,
                      Eigen::VectorXd& ma) {
      int i = 0;
      c = with_const ? v(i++) : 0.0;
      ar.resize(p);
      for (int a = 0; a < p; ++a) ar(a) = v(i++);
      ma.resize(q);
      for (int b = 0; b < q; ++b) ma(b) = v(i++);
    };
    auto objective = [&](const Eigen::VectorXd& v) -> double {
      if (!v.allFinite()) return std::numeric_limits<double>::infinity();
      double c;
      Eigen::VectorXd ar, ma;
      unpack(v, c, ar, ma);
      if ((p > 0 && ar.cwiseAbs().maxCoeff() > 10.0) ||
          (q > 0 && ma.cwiseAbs().maxCoeff() > 10.0))
        return std::numeric_limits<double>::infinity();
      return detail::css_objective(w, c, ar, ma);
    };
    const auto res = nelder_mead(objective, th, 0.1, 1e-10, 1500);
    double c;
    Eigen::VectorXd ar, ma;
    unpack(res.x, c, ar, ma);
    if (detail::min_root_modulus(ar, -1.0) > 1.0 + 1e-9) {
      model.c = c;
      model.ar = ar;
      model.ma = ma;
    } else {
      if (!detail::project_outside_unit_circle(ar, -1.0))
        throw fit_failure_error("fit_arima: could not reach a causal AR polynomial");
      model.c = c;
      model.ar = ar;
      model.ma = ma;
    }
    detail::project_outside_unit_circle(model.ma, 1.0);
  }

  const Eigen::VectorXd e = detail::css_residuals(w, model.c, model.ar, model.ma);
  model.sigma2 = e.tail(e.size() - p).squaredNorm() / std::max<double>(1.0, e.size() - p);
  return model;
}

/// Recursive mean forecasts with future innovations zero, integrated back
/// through the d difference levels.
inline Eigen::VectorXd forecast_arima(const ArimaModel& model, const Eigen::VectorXd& history,
                                      int horizons) {
  const int need = std::max({model.p, model.d, model.q}) + model.d;
  if (history.size() < std::max(need, 1))
    throw insufficient_history_error("forecast_arima: history too short for the model order");

  const Eigen::VectorXd w = detail::difference(history, model.d);
  const Eigen::VectorXd e = detail::css_residuals(w, model.c, model.ar, model.ma);
  const Eigen::Index n = w.size();

  // forecast the differenced series
  std::vector<double> wext(static_cast<std::size_t>(n));
  for (Eigen::Index t = 0; t < n; ++t) wext[static_cast<std::size_t>(t)] = w(t);
  Eigen::VectorXd wf(horizons);
  for (int h = 1; h <= horizons; ++h) {
    double pred = model.c;
    for (int i = 1; i <= model.p; ++i)
      pred += model.ar(i - 1) * wext[static_cast<std::size_t>(n + h - 1 - i)];
    for (int j = 1; j <= model.q; ++j) {
      const Eigen::Index idx = n + h - 1 - j;
      if (idx < n && idx >= model.p) pred += model.ma(j - 1) * e(idx);
    }
    wf(h - 1) = pred;
    wext.push_back(pred);
  }

  // integrate back: maintain the last value of each differencing level
  std::vector<double> last(static_cast<std::size_t>(model.d) + 1);
  {
    Eigen::VectorXd lvl = history;
    for (int i = 0; i <= model.d; ++i) {
      last[static_cast<std::size_t>(i)] = lvl(lvl.size() - 1);
      if (i < model.d) lvl = detail::difference(lvl, 1);
    }
  }
  Eigen::VectorXd out(horizons);
  for (int h = 1; h <= horizons; ++h) {
    double value = wf(h - 1);  // level d forecast
    for (int i = model.d - 1; i >= 0; --i) {
      value = last[static_cast<std::size_t>(i)] + value;
      last[static_cast<std::size_t>(i)] = value;
    }
    out(h - 1) = value;
  }
  return out;
}

struct ArimaOrder {
  int p = 0, d = 0, q = 0;
};

/// Horizon-1 validation MSE grid search over p, q in [0, p_max] x
/// [0, q_max], d in {0, 1}; ties keep the first grid entry (d, then p,
/// then q order).
inline ArimaOrder select_arima_order(const Eigen::VectorXd& train, const Eigen::VectorXd& val,
                                     int p_max = 3, int q_max = 3, int d_max = 1) {
  ArimaOrder best;
  double best_mse = std::numeric_limits<double>::infinity();
  for (int d = 0; d <= d_max; ++d) {
    for (int p = 0; p <= p_max; ++p) {
      for (int q = 0; q <= q_max; ++q) {
        if (train.size() < 10 * (p + q + 1)) continue;
        double sse = 0.0;
        Eigen::Index count = 0;
        try {
          const ArimaModel model = fit_arima(train, p, d, q);
          Eigen::VectorXd history(train.size() + val.size());
          history << train, val;
          for (Eigen::Index t = 0; t < val.size(); ++t) {
            const Eigen::VectorXd fc =
                forecast_arima(model, history.head(train.size() + t), 1);
            const double err = fc(0) - val(t);
            sse += err * err;
            ++count;
          }
        } catch (const Error&) {
          continue;  // unusable order at this sample size
        }
        const double m = count > 0 ? sse / static_cast<double>(count)
                                   : std::numeric_limits<double>::infinity();
        if (m < best_mse) {
          best_mse = m;
          best = {p, d, q};
        }
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// VAR

struct VarModel {
  int p = 1;
  Eigen::VectorXd c;               // N
  std::vector<Eigen::MatrixXd> A;  // p coefficient matrices, N x N

  Eigen::Index dim() const { return c.size(); }
};

/// Multivariate least squares on stacked lags; a singular design falls
/// back to a ridge-jittered normal-equation solve.
inline VarModel fit_var(const Eigen::MatrixXd& y, int p) {
  if (p < 1) throw configuration_error("fit_var: order must be >= 1");
  const Eigen::Index T = y.rows(), N = y.cols();
  const Eigen::Index rows = T - p;
  const Eigen::Index ncol = 1 + p * N;
  if (rows < ncol)
    throw insufficient_data_error("fit_var: " + std::to_string(T) +
                                  " rows cannot identify a VAR(" + std::to_string(p) + ")");

  Eigen::MatrixXd Z(rows, ncol);
  Z.col(0).setOnes();
  for (int k = 1; k <= p; ++k)
    Z.middleCols(1 + (k - 1) * N, N) = y.middleRows(p - k, rows);
  const Eigen::MatrixXd targets = y.bottomRows(rows);

  Eigen::MatrixXd gram = Z.transpose() * Z;
  Eigen::MatrixXd coef;
  double jitter = 0.0;
  for (int attempt = 0;; ++attempt) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(
        jitter == 0.0 ? gram
                      : Eigen::MatrixXd(gram + jitter * Eigen::MatrixXd::Identity(ncol, ncol)));
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      coef = ldlt.solve(Z.transpose() * targets);  // ncol x N
      break;
    }
    if (attempt >= 10) throw singular_design_error("fit_var: design matrix is singular");
    jitter = (jitter == 0.0) ? 1e-10 * gram.diagonal().maxCoeff() : jitter * 10.0;
  }

  VarModel model;
  model.p = p;
  model.c = coef.row(0).transpose();
  model.A.resize(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k)
    model.A[static_cast<std::size_t>(k)] = coef.middleRows(1 + k * N, N).transpose();
  return model;
}

/// Recursive mean forecasts, substituting forecasts for unavailable lags.
inline Eigen::MatrixXd forecast_var(const VarModel& model, const Eigen::MatrixXd& history,
                                    int horizons) {
  const Eigen::Index N = model.dim();
  if (history.cols() != N) throw schema_error("forecast_var: history width mismatch");
  if (history.rows() < model.p)
    throw insufficient_history_error("forecast_var: history shorter than the VAR order");

  std::vector<Eigen::VectorXd> recent;  // most recent first
  for (int k = 0; k < model.p; ++k)
    recent.push_back(history.row(history.rows() - 1 - k).transpose());

  Eigen::MatrixXd out(horizons, N);
  for (int h = 1; h <= horizons; ++h) {
    Eigen::VectorXd next = model.c;
    for (int k = 0; k < model.p; ++k)
      next += model.A[static_cast<std::size_t>(k)] * recent[static_cast<std::size_t>(k)];
    out.row(h - 1) = next.transpose();
    recent.insert(recent.begin(), next);
    recent.pop_back();
  }
  return out;
}

// ---------------------------------------------------------------------------
// EOF

struct EofBasis {
  Eigen::MatrixXd vectors;  // n_locations x k, orthonormal columns
  Eigen::VectorXd values;   // k eigenvalues, nonincreasing
};

/// Leading eigenvectors of the training spatial sample covariance. The
/// eigen-decomposition runs in the smaller of the time and location
/// dimensions (Gram trick).
inline EofBasis eof_basis(const Eigen::MatrixXd& field, int k) {
  const Eigen::Index T = field.rows(), n = field.cols();
  if (T < 2) throw insufficient_data_error("eof_basis: need at least two time points");
  if (k < 1 || k > std::min(T - 1, n))
    throw configuration_error("eof_basis: rank " + std::to_string(k) +
                              " outside [1, min(T-1, n)]");
  const Eigen::MatrixXd centered = field.rowwise() - field.colwise().mean();
  const double denom = static_cast<double>(T - 1);

  EofBasis basis;
  if (n <= T) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(centered.transpose() * centered / denom);
    basis.vectors.resize(n, k);
    basis.values.resize(k);
    for (int j = 0; j < k; ++j) {
      basis.vectors.col(j) = es.eigenvectors().col(n - 1 - j);
      basis.values(j) = es.eigenvalues()(n - 1 - j);
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(centered * centered.transpose() / denom);
    basis.vectors.resize(n, k);
    basis.values.resize(k);
    for (int j = 0; j < k; ++j) {
      const Eigen::VectorXd u = es.eigenvectors().col(T - 1 - j);
      Eigen::VectorXd v = centered.transpose() * u;
      const double norm = v.norm();
      if (norm < 1e-300)
        throw numeric_error("eof_basis: degenerate eigenvector at rank " + std::to_string(j));
      basis.vectors.col(j) = v / norm;
      basis.values(j) = es.eigenvalues()(T - 1 - j);
    }
  }
  return basis;
}

/// Coefficient series: inner products of each field row with the basis.
inline Eigen::MatrixXd eof_project(const Eigen::MatrixXd& field, const EofBasis& basis) {
  if (field.cols() != basis.vectors.rows())
    throw schema_error("eof_project: field width does not match the basis");
  return field * basis.vectors;
}

/// Linear combination of the basis vectors.
inline Eigen::MatrixXd eof_reconstruct(const Eigen::MatrixXd& coeffs, const EofBasis& basis) {
  if (coeffs.cols() != basis.vectors.cols())
    throw schema_error("eof_reconstruct: coefficient width does not match the basis");
  return coeffs * basis.vectors.transpose();
}

}  // namespace sesn

#endif  // SESN_BASELINES_HPP
