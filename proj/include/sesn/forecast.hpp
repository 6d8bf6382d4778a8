#ifndef SESN_FORECAST_HPP
#define SESN_FORECAST_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "sesn/errors.hpp"
#include "sesn/esn.hpp"
#include "sesn/kriging.hpp"
#include "sesn/parallel.hpp"

namespace sesn {

/// A trained ESN: frozen matrices plus the ridge readout.
struct EsnModel {
  EsnSpec spec;
  ReservoirMatrices matrices;
  ReadoutMap readout_map;
  double (*activation)(double) = nullptr;  // nullptr = tanh

  Eigen::Index output_dim() const { return readout_map.output_dim(); }
};

/// Input vector (1, y_{t-1}', ..., y_{t-m}') from rows of a (time x series)
/// matrix; `t` is the row index of the target.
inline Eigen::VectorXd lagged_input(const Eigen::MatrixXd& y, Eigen::Index t, int m) {
  const Eigen::Index n = y.cols();
  Eigen::VectorXd x(1 + m * n);
  x(0) = 1.0;
  for (int k = 1; k <= m; ++k) x.segment(1 + (k - 1) * n, n) = y.row(t - k).transpose();
  return x;
}

/// Trains the readout on a (time x series) residual matrix: the reservoir
/// is run over lagged inputs, the first `burn` state/target pairs are
/// discarded to wash out the zero initial state, and the remaining pairs
/// enter the ridge solve.
inline EsnModel train_esn(const EsnSpec& spec, const Eigen::MatrixXd& y, int burn = 100,
                          double (*activation)(double) = nullptr) {
  spec.validate();
  const Eigen::Index rows = y.rows(), n = y.cols();
  if (rows < spec.m + 2)
    throw insufficient_data_error("train_esn: need more than m + 1 rows of history");
  if (!y.allFinite()) throw invalid_data_error("train_esn: non-finite training values");

  EsnModel model;
  model.spec = spec;
  model.activation = activation;
  model.matrices = generate_matrices(spec, spec.input_dim(n));

  std::vector<Eigen::VectorXd> inputs;
  inputs.reserve(static_cast<std::size_t>(rows - spec.m));
  for (Eigen::Index t = spec.m; t < rows; ++t) inputs.push_back(lagged_input(y, t, spec.m));
  const auto states = run_reservoir(inputs, model.matrices, spec, nullptr, activation);

  const Eigen::Index pairs = static_cast<Eigen::Index>(states.size());
  const Eigen::Index drop = std::min<Eigen::Index>(std::max(burn, 0), pairs - 1);
  const std::vector<ReservoirState> kept(states.begin() + drop, states.end());
  const Eigen::MatrixXd H = build_design(kept);
  const Eigen::MatrixXd targets = y.middleRows(spec.m + drop, pairs - drop);
  model.readout_map = ridge_fit(H, targets, spec.lambda);
  return model;
}

/// Rolls a trained ESN through time. The persistent reservoir state only
/// ever consumes observed values; multi-horizon emission clones the state
/// and substitutes its own forecasts for the future lags it cannot
/// observe.
class KnotForecaster {
 public:
  /// Synchronizes with a history matrix (rows oldest-first) by replaying
  /// it through the reservoir from the zero state.
  KnotForecaster(const EsnModel& model, const Eigen::MatrixXd& history)
      : model_(&model) {
    const int m = model.spec.m;
    if (history.rows() < m)
      throw insufficient_history_error("forecaster: history shorter than the lag count m");
    if (history.cols() != model.output_dim())
      throw schema_error("forecaster: history width does not match the trained output");
    state_.h = Eigen::VectorXd::Zero(model.matrices.W.rows());
    state_.t = -1;
    for (int k = 0; k < m; ++k) lags_.push_front(history.row(k).transpose());
    for (Eigen::Index t = m; t < history.rows(); ++t) observe(history.row(t).transpose());
  }

  /// Consumes one observed vector, advancing the anchor by one step.
  void observe(const Eigen::VectorXd& y) {
    state_ = update_state(state_, input_from(lags_), model_->matrices, model_->spec,
                          model_->activation);
    lags_.push_front(y);
    lags_.pop_back();
  }

  /// Forecasts horizons 1..max_horizon from the current anchor; row h-1
  /// holds the horizon-h forecast.
  Eigen::MatrixXd emit(int max_horizon) const {
    Eigen::MatrixXd out(max_horizon, model_->output_dim());
    ReservoirState s = state_;
    std::deque<Eigen::VectorXd> lags = lags_;
    for (int h = 1; h <= max_horizon; ++h) {
      s = update_state(s, input_from(lags), model_->matrices, model_->spec, model_->activation);
      const Eigen::VectorXd yhat = readout(s, model_->readout_map);
      out.row(h - 1) = yhat.transpose();
      lags.push_front(yhat);
      lags.pop_back();
    }
    return out;
  }

  const ReservoirState& state() const { return state_; }

 private:
  Eigen::VectorXd input_from(const std::deque<Eigen::VectorXd>& lags) const {
    const Eigen::Index n = model_->output_dim();
    Eigen::VectorXd x(1 + model_->spec.m * n);
    x(0) = 1.0;
    for (int k = 0; k < model_->spec.m; ++k)
      x.segment(1 + k * n, n) = lags[static_cast<std::size_t>(k)];
    return x;
  }

  const EsnModel* model_;
  ReservoirState state_;
  std::deque<Eigen::VectorXd> lags_;  // most recent first, exactly m entries
};

/// Multi-step forecasts at the knots from a synchronized model: row h-1 of
/// the result is the horizon-h forecast issued at the end of `history`.
inline Eigen::MatrixXd forecast_knots(const EsnModel& model, const Eigen::MatrixXd& history,
                                      int max_horizon = 3) {
  KnotForecaster fc(model, history);
  return fc.emit(max_horizon);
}

/// Target times assessable for horizon h when training ends at T and data
/// ends at T_max: {T+h, ..., T_max}.
inline std::vector<std::int64_t> evaluation_window(std::int64_t T, std::int64_t T_max, int h) {
  std::vector<std::int64_t> out;
  for (std::int64_t t = T + h; t <= T_max; ++t) out.push_back(t);
  return out;
}

/// Ensemble forecasts over an evaluation window. Member forecasts are
/// indexed [member][h-1] with rows over the horizon-h target list.
struct ForecastEnsemble {
  std::vector<std::vector<Eigen::MatrixXd>> members;
  std::vector<Eigen::MatrixXd> mean;        // [h-1]: targets x knots
  std::vector<Eigen::MatrixXd> full_field;  // [h-1]: targets x locations (after reconstruction)
  int horizons = 3;

  Eigen::Index n_targets(int h) const { return mean[static_cast<std::size_t>(h - 1)].rows(); }
};

/// Trains `member_count` members (member i draws its matrices from seed
/// base_seed + i), rolls each through the evaluation window advancing on
/// observed values, and averages. `eval_y` rows continue `train_y` rows
/// immediately.
inline ForecastEnsemble run_ensemble(const EsnSpec& spec, int member_count,
                                     const Eigen::MatrixXd& train_y,
                                     const Eigen::MatrixXd& eval_y, int horizons = 3,
                                     int burn = 100,
                                     double (*activation)(double) = nullptr) {
  if (member_count < 1) throw configuration_error("run_ensemble: member_count must be >= 1");
  if (train_y.cols() != eval_y.cols())
    throw schema_error("run_ensemble: training and evaluation widths differ");
  const Eigen::Index n = train_y.cols();
  const Eigen::Index n_eval = eval_y.rows();
  if (n_eval < 1) throw insufficient_data_error("run_ensemble: empty evaluation window");

  ForecastEnsemble ens;
  ens.horizons = horizons;
  ens.members.resize(static_cast<std::size_t>(member_count));

  parallel_for(static_cast<std::size_t>(member_count), [&](std::size_t i) {
    EsnSpec member_spec = spec;
    member_spec.seed = spec.seed + i;
    const EsnModel model = train_esn(member_spec, train_y, burn, activation);
    KnotForecaster fc(model, train_y);

    auto& per_h = ens.members[i];
    per_h.resize(static_cast<std::size_t>(horizons));
    for (int h = 1; h <= horizons; ++h)
      per_h[static_cast<std::size_t>(h - 1)].resize(std::max<Eigen::Index>(n_eval - h + 1, 0), n);

    // anchors are the last training time and every evaluation time except
    // the final one; horizon-h targets past the data end are dropped
    for (Eigen::Index a = 0; a < n_eval; ++a) {
      const Eigen::MatrixXd fc_rows = fc.emit(horizons);
      for (int h = 1; h <= horizons; ++h) {
        const Eigen::Index target = a + h - 1;  // row in eval_y
        if (target < n_eval)
          per_h[static_cast<std::size_t>(h - 1)].row(target - (h - 1)) = fc_rows.row(h - 1);
      }
      fc.observe(eval_y.row(a).transpose());
    }
  });

  ens.mean.resize(static_cast<std::size_t>(horizons));
  for (int h = 1; h <= horizons; ++h) {
    auto& m = ens.mean[static_cast<std::size_t>(h - 1)];
    m = Eigen::MatrixXd::Zero(std::max<Eigen::Index>(n_eval - h + 1, 0), n);
    for (const auto& member : ens.members) m += member[static_cast<std::size_t>(h - 1)];
    m /= static_cast<double>(member_count);
  }
  return ens;
}

/// Kriging reconstruction of the ensemble-mean knot forecasts onto the
/// full location list. Linearity makes per-member reconstruction followed
/// by averaging identical, so only the mean is mapped.
inline void reconstruct_full_field(ForecastEnsemble& ens, const KrigingWeights& weights) {
  ens.full_field.resize(ens.mean.size());
  for (std::size_t h = 0; h < ens.mean.size(); ++h)
    ens.full_field[h] = weights.apply(ens.mean[h]);
}

/// Empirical error quantiles per (location, horizon) at the requested
/// probability levels, stored with levels ascending.
struct CalibrationQuantiles {
  std::vector<double> levels;      // probability levels, ascending
  std::vector<Eigen::MatrixXd> q;  // [h-1]: n_levels x n_locations

  int horizons() const { return static_cast<int>(q.size()); }

  Eigen::Index level_index(double p) const {
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (std::abs(levels[i] - p) < 1e-12) return static_cast<Eigen::Index>(i);
    throw configuration_error("calibration: probability level " + std::to_string(p) +
                              " was not calibrated");
  }

  /// Quantile offsets (lower, upper) of the central interval at level
  /// alpha, i.e. the (1-alpha)/2 and (1+alpha)/2 error quantiles.
  std::pair<double, double> interval_offsets(double alpha, int h, Eigen::Index loc) const {
    const auto& m = q[static_cast<std::size_t>(h - 1)];
    return {m(level_index((1.0 - alpha) / 2.0), loc), m(level_index((1.0 + alpha) / 2.0), loc)};
  }
};

/// Lower order statistic: the smallest sample value whose empirical CDF
/// reaches p.
inline double empirical_quantile(std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  const std::size_t idx =
      std::min(n - 1, static_cast<std::size_t>(std::max(
                          0.0, std::ceil(p * static_cast<double>(n)) - 1.0)));
  return sorted[idx];
}

/// Error quantiles of (truth - forecast) per location and horizon over a
/// calibration window. `truth` and `forecasts[h-1]` must be row-aligned on
/// the horizon-h target list.
inline CalibrationQuantiles calibrate(const std::vector<Eigen::MatrixXd>& truth,
                                      const std::vector<Eigen::MatrixXd>& forecasts,
                                      std::vector<double> levels) {
  if (truth.size() != forecasts.size())
    throw schema_error("calibrate: truth and forecast horizon counts differ");
  if (levels.empty()) throw configuration_error("calibrate: no probability levels");
  for (double p : levels)
    if (!(p >= 0.0) || !(p <= 1.0))
      throw configuration_error("calibrate: probability level outside [0, 1]");
  std::sort(levels.begin(), levels.end());

  CalibrationQuantiles out;
  out.levels = levels;
  out.q.resize(truth.size());
  for (std::size_t h = 0; h < truth.size(); ++h) {
    if (truth[h].rows() != forecasts[h].rows() || truth[h].cols() != forecasts[h].cols())
      throw schema_error("calibrate: truth/forecast shape mismatch at horizon " +
                         std::to_string(h + 1));
    const Eigen::Index n_samples = truth[h].rows(), n_loc = truth[h].cols();
    if (n_samples < static_cast<Eigen::Index>(levels.size()))
      throw insufficient_data_error("calibrate: " + std::to_string(n_samples) +
                                    " samples cannot resolve " +
                                    std::to_string(levels.size()) + " quantile levels");
    out.q[h].resize(static_cast<Eigen::Index>(levels.size()), n_loc);
    for (Eigen::Index j = 0; j < n_loc; ++j) {
      std::vector<double> errors(static_cast<std::size_t>(n_samples));
      for (Eigen::Index t = 0; t < n_samples; ++t)
        errors[static_cast<std::size_t>(t)] = truth[h](t, j) - forecasts[h](t, j);
      std::sort(errors.begin(), errors.end());
      for (std::size_t l = 0; l < levels.size(); ++l)
        out.q[h](static_cast<Eigen::Index>(l), j) = empirical_quantile(errors, levels[l]);
    }
  }
  return out;
}

struct CoverageSummary {
  Eigen::VectorXd per_location;  // fraction inside the closed interval
  double mean = 0.0;
  double sd = 0.0;  // across locations
};

/// Fraction of targets whose truth lies inside the level-alpha interval
/// around the forecast, per location, with the cross-location mean and
/// standard deviation.
inline CoverageSummary coverage(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& forecast,
                                const CalibrationQuantiles& cal, int h, double alpha) {
  if (truth.rows() != forecast.rows() || truth.cols() != forecast.cols())
    throw schema_error("coverage: truth/forecast shape mismatch");
  const Eigen::Index n_loc = truth.cols(), n_t = truth.rows();
  CoverageSummary out;
  out.per_location.resize(n_loc);
  for (Eigen::Index j = 0; j < n_loc; ++j) {
    const auto [lo, hi] = cal.interval_offsets(alpha, h, j);
    Eigen::Index inside = 0;
    for (Eigen::Index t = 0; t < n_t; ++t) {
      const double l = forecast(t, j) + lo, u = forecast(t, j) + hi;
      if (truth(t, j) >= l && truth(t, j) <= u) ++inside;
    }
    out.per_location(j) = static_cast<double>(inside) / static_cast<double>(n_t);
  }
  out.mean = out.per_location.mean();
  out.sd = n_loc > 1 ? std::sqrt((out.per_location.array() - out.mean).square().sum() /
                                 static_cast<double>(n_loc - 1))
                     : 0.0;
  return out;
}

/// Mean squared error over all (time, location) entries.
inline double mse(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& forecast) {
  if (truth.rows() != forecast.rows() || truth.cols() != forecast.cols())
    throw schema_error("mse: shape mismatch");
  if (truth.size() == 0) return 0.0;
  return (truth - forecast).array().square().mean();
}

}  // namespace sesn

#endif  // SESN_FORECAST_HPP
