#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sesn/forecast.hpp"
#include "sesn/kriging.hpp"
#include "sesn/rng.hpp"

using namespace sesn;

namespace {

double identity_activation(double v) { return v; }

/// Model whose reservoir simply copies one input slot: W = 0, identity
/// activation, phi = 1, U = e_slot. The readout doubles the state, so the
/// forecast at each horizon reveals exactly which lag entry fed the
/// reservoir (an observed value or an earlier forecast).
EsnModel probe_model(int m, int n_star, int slot) {
  EsnModel model;
  model.spec.n_h = 1;
  model.spec.m = m;
  model.spec.phi = 1.0;
  model.spec.delta = 0.9;
  model.spec.lambda = 0.0;
  model.activation = identity_activation;
  model.matrices.W.resize(1, 1);
  model.matrices.lambda_w = 0.0;
  model.matrices.U.resize(1, 1 + m * n_star);
  model.matrices.U.insert(0, slot) = 1.0;
  model.matrices.U.makeCompressed();
  model.readout_map.B.resize(2, n_star);
  model.readout_map.B.setZero();
  model.readout_map.B(0, 0) = 2.0;  // y_hat(0) = 2 h
  return model;
}

Eigen::MatrixXd synthetic_series(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd y(rows, cols);
  for (int t = 0; t < rows; ++t) {
    for (int j = 0; j < cols; ++j)
      y(t, j) = std::sin(0.37 * t + j) + 0.25 * rng.normal();
  }
  return y;
}

}  // namespace

TEST_CASE("evaluation window lists the assessable targets", "[forecast]") {
  CHECK(evaluation_window(0, 5, 2) == std::vector<std::int64_t>{2, 3, 4, 5});
  CHECK(evaluation_window(0, 5, 1) == std::vector<std::int64_t>{1, 2, 3, 4, 5});
  CHECK(evaluation_window(7, 8, 3).empty());
}

TEST_CASE("multi-step emission substitutes forecasts for future lags", "[forecast]") {
  // m = 1: the horizon-2 input holds only the horizon-1 forecast, so a
  // gain-2 probe doubles at every horizon
  {
    const auto model = probe_model(1, 1, 1);  // reads the lag-1 slot
    Eigen::MatrixXd history(3, 1);
    history << 10.0, 20.0, 30.0;
    const Eigen::MatrixXd fc = forecast_knots(model, history, 3);
    CHECK(fc(0, 0) == 60.0);   // h1 lag-1 = y_t = 30
    CHECK(fc(1, 0) == 120.0);  // h2 lag-1 = y_hat_{t+1} = 60
    CHECK(fc(2, 0) == 240.0);  // h3 lag-1 = y_hat_{t+2} = 120
  }
  // m = 2: horizon-3 input is (1, y_hat_{t+2}, y_hat_{t+1})
  {
    const auto model2 = probe_model(2, 1, 2);  // reads the lag-2 slot
    Eigen::MatrixXd history(4, 1);
    history << 1.0, 2.0, 3.0, 4.0;
    const Eigen::MatrixXd fc = forecast_knots(model2, history, 3);
    CHECK(fc(0, 0) == 6.0);   // h1 lag-2 = y_{t-1} = 3
    CHECK(fc(1, 0) == 8.0);   // h2 lag-2 = y_t = 4
    CHECK(fc(2, 0) == 12.0);  // h3 lag-2 = y_hat_{t+1} = 6
  }
  // m = 3, horizon 3: input is (1, y_hat_{t+2}, y_hat_{t+1}, y_t)
  {
    const auto model3 = probe_model(3, 1, 3);  // reads the lag-3 slot
    Eigen::MatrixXd history(5, 1);
    history << 1.0, 2.0, 3.0, 4.0, 5.0;
    const Eigen::MatrixXd fc = forecast_knots(model3, history, 3);
    CHECK(fc(0, 0) == 6.0);   // h1 lag-3 = y_{t-2} = 3
    CHECK(fc(1, 0) == 8.0);   // h2 lag-3 = y_{t-1} = 4
    CHECK(fc(2, 0) == 10.0);  // h3 lag-3 = y_t = 5
  }
}

TEST_CASE("zero readout forecasts zero at all horizons", "[forecast]") {
  EsnSpec spec;
  spec.n_h = 8;
  spec.m = 2;
  spec.a_u = 0.1;
  spec.pi_u = 1.0;
  spec.seed = 50;
  EsnModel model;
  model.spec = spec;
  model.matrices = generate_matrices(spec, spec.input_dim(3));
  model.readout_map.B = Eigen::MatrixXd::Zero(16, 3);
  const Eigen::MatrixXd fc = forecast_knots(model, synthetic_series(20, 3, 51), 3);
  CHECK(fc.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("history shorter than the lag count is rejected", "[forecast]") {
  const auto model = probe_model(3, 1, 1);
  Eigen::MatrixXd history(2, 1);
  history << 1.0, 2.0;
  CHECK_THROWS_AS(forecast_knots(model, history, 1), Error);
}

TEST_CASE("recursion consistency: h2 now equals h1 after appending the h1 forecast",
          "[forecast]") {
  const Eigen::MatrixXd y = synthetic_series(120, 2, 52);
  EsnSpec spec;
  spec.n_h = 24;
  spec.m = 1;
  spec.a_u = 0.1;
  spec.pi_u = 1.0;
  spec.lambda = 0.05;
  spec.seed = 53;
  const EsnModel model = train_esn(spec, y, 10);

  const Eigen::MatrixXd two = forecast_knots(model, y, 2);
  Eigen::MatrixXd extended(y.rows() + 1, y.cols());
  extended << y, two.row(0);
  const Eigen::MatrixXd one = forecast_knots(model, extended, 1);
  CHECK((two.row(1) - one.row(0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single-member ensemble equals its member, duplicates average to themselves",
          "[forecast]") {
  const Eigen::MatrixXd train = synthetic_series(150, 3, 54);
  const Eigen::MatrixXd eval = synthetic_series(30, 3, 55);
  EsnSpec spec;
  spec.n_h = 16;
  spec.m = 1;
  spec.a_u = 0.1;
  spec.pi_u = 1.0;
  spec.lambda = 0.05;
  spec.seed = 60;

  const auto one = run_ensemble(spec, 1, train, eval, 3, 20);
  for (int h = 0; h < 3; ++h)
    CHECK((one.mean[h] - one.members[0][h]).cwiseAbs().maxCoeff() == 0.0);

  // two members with the same seed are identical, and so is their mean
  const auto m0 = run_ensemble(spec, 1, train, eval, 3, 20);
  EsnSpec next = spec;
  next.seed = spec.seed + 1;
  const auto m1 = run_ensemble(next, 1, train, eval, 3, 20);
  const auto both = run_ensemble(spec, 2, train, eval, 3, 20);
  for (int h = 0; h < 3; ++h) {
    CHECK((both.members[0][h] - m0.members[0][h]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((both.members[1][h] - m1.members[0][h]).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd avg = 0.5 * (both.members[0][h] + both.members[1][h]);
    CHECK((both.mean[h] - avg).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("ensemble mean error never exceeds the worst member", "[forecast]") {
  Rng rng(61);
  Eigen::MatrixXd series(260, 2);
  double a = 0.3, b = -0.2;
  for (int t = 0; t < 260; ++t) {
    const double na = 0.9 * a - 0.4 * b + 0.1 * rng.normal();
    const double nb = 0.4 * a + 0.8 * b + 0.1 * rng.normal();
    a = std::tanh(na);
    b = std::tanh(nb);
    series(t, 0) = a;
    series(t, 1) = b;
  }
  const Eigen::MatrixXd train = series.topRows(200);
  const Eigen::MatrixXd eval = series.bottomRows(60);
  EsnSpec spec;
  spec.n_h = 32;
  spec.m = 1;
  spec.a_u = 0.1;
  spec.pi_u = 1.0;
  spec.lambda = 0.05;
  spec.seed = 62;

  const auto ens = run_ensemble(spec, 8, train, eval, 1, 20);
  const Eigen::MatrixXd truth = eval;
  double worst = 0.0;
  for (const auto& member : ens.members) worst = std::max(worst, mse(truth, member[0]));
  CHECK(mse(truth, ens.mean[0]) <= worst + 1e-12);
}

TEST_CASE("reconstruction of the mean equals the mean of reconstructions", "[forecast]") {
  const Eigen::MatrixXd train = synthetic_series(120, 3, 63);
  const Eigen::MatrixXd eval = synthetic_series(25, 3, 64);
  EsnSpec spec;
  spec.n_h = 12;
  spec.m = 1;
  spec.a_u = 0.1;
  spec.pi_u = 1.0;
  spec.lambda = 0.1;
  spec.seed = 65;
  auto ens = run_ensemble(spec, 4, train, eval, 2, 10);

  KrigingWeights w;
  Rng rng(66);
  w.weights.resize(7, 3);
  for (Eigen::Index i = 0; i < w.weights.size(); ++i) w.weights(i / 3, i % 3) = rng.uniform(0, 1);

  reconstruct_full_field(ens, w);
  for (int h = 0; h < 2; ++h) {
    Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(ens.members[0][h].rows(), 7);
    for (const auto& member : ens.members) avg += w.apply(member[h]);
    avg /= static_cast<double>(ens.members.size());
    CHECK((ens.full_field[h] - avg).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("zero errors calibrate to all-zero quantiles and degenerate intervals",
          "[forecast]") {
  Eigen::MatrixXd truth = synthetic_series(50, 2, 70);
  const std::vector<Eigen::MatrixXd> t{truth}, f{truth};
  const auto cal = calibrate(t, f, {0.1, 0.5, 0.9});
  CHECK(cal.q[0].cwiseAbs().maxCoeff() == 0.0);
  const auto [lo, hi] = cal.interval_offsets(0.8, 1, 0);
  CHECK(lo == 0.0);
  CHECK(hi == 0.0);
}

TEST_CASE("empirical quantiles converge on Gaussian errors", "[forecast]") {
  Rng rng(171);
  Eigen::MatrixXd truth(10000, 1), fc(10000, 1);
  for (int t = 0; t < 10000; ++t) {
    fc(t, 0) = 0.0;
    truth(t, 0) = rng.normal();
  }
  const auto cal = calibrate({truth}, {fc}, {0.025, 0.975});
  CHECK(cal.q[0](1, 0) == Catch::Approx(1.959964).margin(0.05));
  CHECK(cal.q[0](0, 0) == Catch::Approx(-1.959964).margin(0.05));
}

TEST_CASE("quantiles are monotone in the level and intervals are nested", "[forecast]") {
  Rng rng(72);
  Eigen::MatrixXd truth(400, 3), fc(400, 3);
  for (Eigen::Index t = 0; t < 400; ++t)
    for (int j = 0; j < 3; ++j) {
      fc(t, j) = rng.uniform(-1, 1);
      truth(t, j) = fc(t, j) + rng.normal() * (0.5 + 0.2 * j) + 0.1;
    }
  std::vector<double> probs = {0.025, 0.1, 0.2, 0.5, 0.8, 0.9, 0.975};
  const auto cal = calibrate({truth, truth}, {fc, fc}, probs);
  for (int h = 1; h <= 2; ++h)
    for (int j = 0; j < 3; ++j)
      for (std::size_t l = 1; l < probs.size(); ++l)
        CHECK(cal.q[static_cast<std::size_t>(h - 1)](static_cast<Eigen::Index>(l), j) >=
              cal.q[static_cast<std::size_t>(h - 1)](static_cast<Eigen::Index>(l - 1), j));

  for (int j = 0; j < 3; ++j) {
    const auto [lo60, hi60] = cal.interval_offsets(0.6, 1, j);
    const auto [lo80, hi80] = cal.interval_offsets(0.8, 1, j);
    const auto [lo95, hi95] = cal.interval_offsets(0.95, 1, j);
    CHECK(lo95 <= lo80);
    CHECK(lo80 <= lo60);
    CHECK(hi60 <= hi80);
    CHECK(hi80 <= hi95);
  }
}

TEST_CASE("coverage is 1 for exact forecasts with zero-width intervals", "[forecast]") {
  Eigen::MatrixXd truth = synthetic_series(60, 2, 73);
  const auto cal = calibrate({truth}, {truth}, {0.1, 0.9});
  const auto cov = coverage(truth, truth, cal, 1, 0.8);
  CHECK(cov.mean == 1.0);
  CHECK(cov.per_location.minCoeff() == 1.0);
}

TEST_CASE("split-sample Gaussian coverage hits the nominal level", "[forecast]") {
  Rng rng(74);
  const int n = 4000;
  Eigen::MatrixXd cal_truth(n, 1), cal_fc(n, 1), eval_truth(n, 1), eval_fc(n, 1);
  for (int t = 0; t < n; ++t) {
    cal_fc(t, 0) = 0.0;
    eval_fc(t, 0) = 0.0;
    cal_truth(t, 0) = rng.normal();
    eval_truth(t, 0) = rng.normal();
  }
  const auto cal = calibrate({cal_truth}, {cal_fc}, {0.1, 0.9});
  const auto cov = coverage(eval_truth, eval_fc, cal, 1, 0.8);
  CHECK(cov.mean > 0.77);
  CHECK(cov.mean < 0.83);
}

TEST_CASE("mse basics", "[forecast]") {
  Eigen::MatrixXd truth = synthetic_series(30, 2, 75);
  CHECK(mse(truth, truth) == 0.0);
  const Eigen::MatrixXd shifted = truth.array() + 3.0;
  CHECK(mse(truth, shifted) == Catch::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("calibration input validation", "[forecast]") {
  Eigen::MatrixXd truth(2, 1), fc(2, 1);
  truth.setZero();
  fc.setZero();
  CHECK_THROWS_AS(calibrate({truth}, {fc}, {0.1, 0.5, 0.9}), Error);  // 2 samples, 3 levels
  CHECK_THROWS_AS(calibrate({truth}, {fc}, {}), Error);
  CHECK_THROWS_AS(calibrate({truth}, {fc}, {1.5}), Error);
}
