#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sesn/baselines.hpp"
#include "sesn/rng.hpp"

using namespace sesn;

TEST_CASE("persistence repeats the last observation at every horizon", "[baselines]") {
  Eigen::MatrixXd history(4, 2);
  history << 1, 2, 3, 4, 5, 6, 3.2, -1.0;
  const Eigen::MatrixXd fc = persistence_forecast(history, 3);
  for (int h = 0; h < 3; ++h) {
    CHECK(fc(h, 0) == 3.2);
    CHECK(fc(h, 1) == -1.0);
  }
  CHECK_THROWS_AS(persistence_forecast(Eigen::MatrixXd(0, 2), 3), Error);
}

TEST_CASE("persistence one-step MSE on white noise is about 2", "[baselines]") {
  Rng rng(80);
  const int n = 20000;
  double sse = 0.0;
  double prev = rng.normal();
  for (int t = 1; t < n; ++t) {
    const double cur = rng.normal();
    sse += (cur - prev) * (cur - prev);
    prev = cur;
  }
  CHECK(sse / (n - 1) == Catch::Approx(2.0).margin(0.08));
}

TEST_CASE("least squares recovers an AR(1) coefficient", "[baselines]") {
  Rng rng(81);
  Eigen::VectorXd y(5000);
  y(0) = 0.0;
  for (int t = 1; t < 5000; ++t) y(t) = 0.7 * y(t - 1) + rng.normal();
  const ArimaModel model = fit_arima(y, 1, 0, 0);
  CHECK(model.ar(0) > 0.65);
  CHECK(model.ar(0) < 0.75);
  CHECK(model.sigma2 == Catch::Approx(1.0).margin(0.1));
}

TEST_CASE("white noise fits to its sample mean", "[baselines]") {
  Rng rng(82);
  Eigen::VectorXd y(400);
  for (int t = 0; t < 400; ++t) y(t) = 1.5 + rng.normal();
  const ArimaModel model = fit_arima(y, 0, 0, 0);
  CHECK(model.c == Catch::Approx(y.mean()));
  const Eigen::VectorXd fc = forecast_arima(model, y, 3);
  for (int h = 0; h < 3; ++h) CHECK(fc(h) == Catch::Approx(y.mean()));
}

TEST_CASE("ARIMA(0,1,0) is exactly persistence", "[baselines]") {
  Rng rng(83);
  Eigen::VectorXd y(300);
  y(0) = 0.0;
  for (int t = 1; t < 300; ++t) y(t) = y(t - 1) + rng.normal();
  const ArimaModel model = fit_arima(y, 0, 1, 0);
  const Eigen::VectorXd fc = forecast_arima(model, y, 3);
  for (int h = 0; h < 3; ++h) CHECK(fc(h) == y(299));
}

TEST_CASE("AR(1) forecasts decay geometrically", "[baselines]") {
  ArimaModel model;
  model.p = 1;
  model.ar.resize(1);
  model.ar << 0.5;
  model.ma.resize(0);
  model.c = 0.0;
  Eigen::VectorXd history(3);
  history << 0.3, -0.1, 2.0;
  const Eigen::VectorXd fc = forecast_arima(model, history, 3);
  CHECK(fc(0) == Catch::Approx(1.0));
  CHECK(fc(1) == Catch::Approx(0.5));
  CHECK(fc(2) == Catch::Approx(0.25));
}

TEST_CASE("ARMA estimation is close on simulated data", "[baselines]") {
  Rng rng(84);
  Eigen::VectorXd y(6000);
  double e_prev = rng.normal();
  y(0) = e_prev;
  for (int t = 1; t < 6000; ++t) {
    const double e = rng.normal();
    y(t) = 0.6 * y(t - 1) + e + 0.4 * e_prev;
    e_prev = e;
  }
  const ArimaModel model = fit_arima(y, 1, 0, 1);
  CHECK(model.ar(0) == Catch::Approx(0.6).margin(0.08));
  CHECK(model.ma(0) == Catch::Approx(0.4).margin(0.1));
}

TEST_CASE("fitted AR polynomials are causal even on explosive data", "[baselines]") {
  Rng rng(85);
  Eigen::VectorXd y(200);
  y(0) = 0.01;
  for (int t = 1; t < 200; ++t) y(t) = 1.04 * y(t - 1) + 0.01 * rng.normal();
  const ArimaModel model = fit_arima(y, 1, 0, 0);
  CHECK(detail::min_root_modulus(model.ar, -1.0) > 1.0);
}

TEST_CASE("order preconditions are enforced", "[baselines]") {
  Eigen::VectorXd y(25);
  y.setZero();
  CHECK_THROWS_AS(fit_arima(y, 1, 0, 1), Error);   // 25 < 10 (p+q+1)
  CHECK_THROWS_AS(fit_arima(y, 0, 3, 0), Error);   // d out of range
  CHECK_THROWS_AS(fit_arima(y, -1, 0, 0), Error);
}

TEST_CASE("a constructed diagonal VAR forecasts like independent ARs", "[baselines]") {
  VarModel var;
  var.p = 1;
  var.c = Eigen::VectorXd::Zero(2);
  var.A = {Eigen::MatrixXd::Zero(2, 2)};
  var.A[0](0, 0) = 0.7;
  var.A[0](1, 1) = -0.3;

  Eigen::MatrixXd history(4, 2);
  history << 0.1, 0.2, 0.5, -0.9, 1.0, 0.4, 2.0, -1.0;
  const Eigen::MatrixXd fc = forecast_var(var, history, 3);

  ArimaModel ar0;
  ar0.p = 1;
  ar0.ar.resize(1);
  ar0.ar << 0.7;
  ArimaModel ar1;
  ar1.p = 1;
  ar1.ar.resize(1);
  ar1.ar << -0.3;
  const Eigen::VectorXd fc0 = forecast_arima(ar0, history.col(0), 3);
  const Eigen::VectorXd fc1 = forecast_arima(ar1, history.col(1), 3);
  for (int h = 0; h < 3; ++h) {
    CHECK(fc(h, 0) == Catch::Approx(fc0(h)).margin(1e-6));
    CHECK(fc(h, 1) == Catch::Approx(fc1(h)).margin(1e-6));
  }
}

TEST_CASE("VAR with zero coefficients forecasts the intercept", "[baselines]") {
  VarModel var;
  var.p = 1;
  var.c = Eigen::VectorXd::Constant(3, 0.8);
  var.A = {Eigen::MatrixXd::Zero(3, 3)};
  Eigen::MatrixXd history = Eigen::MatrixXd::Random(5, 3);
  const Eigen::MatrixXd fc = forecast_var(var, history, 2);
  CHECK((fc.array() - 0.8).abs().maxCoeff() < 1e-15);
}

TEST_CASE("VAR least squares is consistent on a coupled system", "[baselines]") {
  Rng rng(86);
  Eigen::MatrixXd A(2, 2);
  A << 0.5, 0.2, -0.3, 0.6;
  Eigen::MatrixXd y(5000, 2);
  y.row(0).setZero();
  for (int t = 1; t < 5000; ++t) {
    const Eigen::Vector2d prev = y.row(t - 1).transpose();
    const Eigen::Vector2d next =
        A * prev + Eigen::Vector2d(rng.normal(), rng.normal());
    y.row(t) = next.transpose();
  }
  const VarModel fit = fit_var(y, 1);
  CHECK((fit.A[0] - A).cwiseAbs().maxCoeff() < 0.05);
  CHECK(fit.c.cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("singular VAR designs fall back to a jittered solve", "[baselines]") {
  Eigen::MatrixXd y(30, 2);
  for (int t = 0; t < 30; ++t) {
    y(t, 0) = 0.1 * t;
    y(t, 1) = 0.2 * t;  // perfectly collinear columns
  }
  const VarModel fit = fit_var(y, 1);
  CHECK(fit.A[0].allFinite());
}

TEST_CASE("full EOF basis reconstructs exactly", "[baselines]") {
  Rng rng(87);
  Eigen::MatrixXd field(50, 6);
  for (Eigen::Index i = 0; i < field.size(); ++i) field(i / 6, i % 6) = rng.normal();
  const EofBasis basis = eof_basis(field, 6);

  // orthonormality and nonincreasing eigenvalues
  const Eigen::MatrixXd gram = basis.vectors.transpose() * basis.vectors;
  CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-8);
  for (int j = 1; j < 6; ++j) CHECK(basis.values(j) <= basis.values(j - 1) + 1e-12);

  const Eigen::MatrixXd coeffs = eof_project(field, basis);
  CHECK((eof_reconstruct(coeffs, basis) - field).cwiseAbs().maxCoeff() < 1e-8);

  // projection energy never exceeds the field energy; equality at full rank
  CHECK(coeffs.squaredNorm() <= field.squaredNorm() + 1e-8);
  CHECK(coeffs.squaredNorm() == Catch::Approx(field.squaredNorm()).epsilon(1e-10));
}

TEST_CASE("a field equal to an eigenvector projects to a unit coefficient", "[baselines]") {
  Rng rng(88);
  Eigen::MatrixXd field(40, 5);
  for (Eigen::Index i = 0; i < field.size(); ++i) field(i / 5, i % 5) = rng.normal();
  const EofBasis basis = eof_basis(field, 3);
  const Eigen::MatrixXd probe = basis.vectors.col(0).transpose();
  const Eigen::MatrixXd coeffs = eof_project(probe, basis);
  CHECK(coeffs(0, 0) == Catch::Approx(1.0).margin(1e-10));
  CHECK(std::abs(coeffs(0, 1)) < 1e-10);
  CHECK(std::abs(coeffs(0, 2)) < 1e-10);
}

TEST_CASE("rank-2 fields reconstruct exactly with 2 EOFs and lose the tail with 1",
          "[baselines]") {
  Rng rng(89);
  Eigen::VectorXd u1(8), u2(8);
  for (int i = 0; i < 8; ++i) {
    u1(i) = rng.normal();
    u2(i) = rng.normal();
  }
  Eigen::MatrixXd field(200, 8);
  for (int t = 0; t < 200; ++t)
    field.row(t) = (3.0 * rng.normal() * u1 + 1.0 * rng.normal() * u2).transpose();

  const EofBasis b2 = eof_basis(field, 2);
  const Eigen::MatrixXd r2 = eof_reconstruct(eof_project(field, b2), b2);
  const Eigen::MatrixXd centered = field.rowwise() - field.colwise().mean();
  CHECK((r2 - field).cwiseAbs().maxCoeff() < 1e-6);

  const EofBasis b1 = eof_basis(field, 1);
  const Eigen::MatrixXd r1 = eof_reconstruct(eof_project(centered, b1), b1);
  const double err = (centered - r1).squaredNorm() / (field.rows() - 1.0);
  const EofBasis full = eof_basis(field, 2);
  CHECK(err == Catch::Approx(full.values(1)).epsilon(0.05));
}

TEST_CASE("Gram trick path (more locations than times) stays orthonormal", "[baselines]") {
  Rng rng(90);
  Eigen::MatrixXd field(12, 30);
  for (Eigen::Index i = 0; i < field.size(); ++i) field(i / 30, i % 30) = rng.normal();
  const EofBasis basis = eof_basis(field, 8);
  const Eigen::MatrixXd gram = basis.vectors.transpose() * basis.vectors;
  CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-8);
  for (int j = 1; j < 8; ++j) CHECK(basis.values(j) <= basis.values(j - 1) + 1e-12);
}

TEST_CASE("order selection prefers the generating order on AR data", "[baselines]") {
  Rng rng(91);
  Eigen::VectorXd y(1200);
  y(0) = 0;
  for (int t = 1; t < 1200; ++t) y(t) = 0.8 * y(t - 1) + rng.normal();
  const ArimaOrder order = select_arima_order(y.head(900), y.tail(300), 2, 1, 1);
  CHECK(order.d == 0);
  CHECK(order.p >= 1);
}
