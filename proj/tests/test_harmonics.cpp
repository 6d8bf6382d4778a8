#include <catch2/catch_amalgamated.hpp>

#include "sesn/harmonics.hpp"
#include "sesn/rng.hpp"

using namespace sesn;

namespace {

SpaceTimeField make_field(int n_times, int n_loc, std::int64_t start = 0) {
  SpaceTimeField f;
  for (int j = 0; j < n_loc; ++j)
    f.locations.push_back({"L" + std::to_string(j), 0.1 * j, 0.2 * j});
  f.start = start;
  f.values.resize(n_times, n_loc);
  return f;
}

}  // namespace

TEST_CASE("periodogram of a constant series has no spectral mass", "[harmonics]") {
  Eigen::VectorXd s = Eigen::VectorXd::Constant(8, 4.2);
  for (const auto& [period, amp] : periodogram(s)) {
    CHECK(period > 0.0);
    CHECK(amp == Catch::Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("periodogram of a pure daily cosine peaks at period 24", "[harmonics]") {
  const int n = 240;
  Eigen::VectorXd s(n);
  for (int t = 0; t < n; ++t) s(t) = std::cos(kTwoPi * t / 24.0);
  const auto spec = periodogram(s);
  // closed-form DFT of cos(2 pi f0 t / n): |X_{f0}| = n/2, so the folded
  // one-sided amplitude is sqrt(2 (n/2)^2 / n) = sqrt(n/2)
  const double expected = std::sqrt(n / 2.0);
  for (const auto& [period, amp] : spec) {
    if (period == Catch::Approx(24.0))
      CHECK(amp == Catch::Approx(expected).epsilon(1e-10));
    else
      CHECK(amp < 1e-8);
  }
}

TEST_CASE("periodogram is linear: two cosines keep their 2:1 ratio", "[harmonics]") {
  const int n = 240;
  Eigen::VectorXd s(n);
  for (int t = 0; t < n; ++t)
    s(t) = std::cos(kTwoPi * t / 24.0) + 0.5 * std::cos(kTwoPi * t / 12.0);
  double amp24 = 0, amp12 = 0;
  for (const auto& [period, amp] : periodogram(s)) {
    if (period == Catch::Approx(24.0)) amp24 = amp;
    if (period == Catch::Approx(12.0)) amp12 = amp;
  }
  CHECK(amp24 / amp12 == Catch::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("periodogram satisfies Parseval on random input", "[harmonics]") {
  Rng rng(11);
  Eigen::VectorXd s(257);
  for (Eigen::Index t = 0; t < s.size(); ++t) s(t) = rng.normal() + 0.5;
  const Eigen::VectorXd centered = s.array() - s.mean();
  double energy = 0.0;
  for (const auto& [period, amp] : periodogram(s)) energy += amp * amp;
  CHECK(energy == Catch::Approx(centered.squaredNorm()).margin(1e-8));
}

TEST_CASE("periodogram rejects bad input", "[harmonics]") {
  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK_THROWS_AS(periodogram(one), Error);
  Eigen::VectorXd nan(8);
  nan.setZero();
  nan(3) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(periodogram(nan), Error);
}

TEST_CASE("constant field fits to a pure intercept", "[harmonics]") {
  auto f = make_field(100, 3);
  f.values.setConstant(9.0);
  const auto model = fit_harmonics(f, {24.0});
  for (int j = 0; j < 3; ++j) {
    CHECK(model.coefficients(0, j) == Catch::Approx(3.0).margin(1e-12));
    CHECK(model.coefficients(1, j) == Catch::Approx(0.0).margin(1e-10));
    CHECK(model.coefficients(2, j) == Catch::Approx(0.0).margin(1e-10));
    CHECK(model.scale(j) > 0.0);
  }
}

TEST_CASE("noiseless harmonic signal is recovered exactly", "[harmonics]") {
  auto f = make_field(480, 2);
  for (int t = 0; t < 480; ++t) {
    const double root = 2.0 + std::cos(kTwoPi * t / 24.0);
    f.values(t, 0) = root * root;
    f.values(t, 1) = root * root;
  }
  const auto model = fit_harmonics(f, {24.0});
  CHECK(model.coefficients(0, 0) == Catch::Approx(2.0).margin(1e-8));
  CHECK(model.coefficients(1, 0) == Catch::Approx(1.0).margin(1e-8));
  CHECK(model.coefficients(2, 0) == Catch::Approx(0.0).margin(1e-8));
}

TEST_CASE("training residuals have unit variance and orthogonal design", "[harmonics]") {
  Rng rng(5);
  auto f = make_field(600, 4, 17);
  for (Eigen::Index t = 0; t < 600; ++t)
    for (int j = 0; j < 4; ++j) {
      const double root = 2.5 + 0.4 * std::cos(kTwoPi * (17 + t) / 24.0) + 0.3 * rng.normal();
      f.values(t, j) = root * root;
    }
  const auto model = fit_harmonics(f, {24.0, 12.0});
  const auto resid = detrend(f, model);

  const Eigen::MatrixXd X = detail::harmonic_design(f.start, 600, model.periods);
  for (int j = 0; j < 4; ++j) {
    const double var = resid.values.col(j).squaredNorm() / 599.0 -
                       std::pow(resid.values.col(j).mean(), 2) * 600.0 / 599.0;
    CHECK(var == Catch::Approx(1.0).margin(1e-10));
    // normal equations: X' (unit-scaled residual) = 0
    const Eigen::VectorXd grad = X.transpose() * resid.values.col(j) * model.scale(j);
    CHECK(grad.cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("field equal to the fitted mean squared detrends to zero", "[harmonics]") {
  Rng rng(6);
  auto f = make_field(300, 2);
  for (Eigen::Index t = 0; t < 300; ++t)
    for (int j = 0; j < 2; ++j)
      f.values(t, j) = std::pow(3.0 + 0.2 * std::sin(kTwoPi * t / 12.0) + 0.1 * rng.normal(), 2);
  const auto model = fit_harmonics(f, {12.0});

  SpaceTimeField mean_field = f;
  for (Eigen::Index t = 0; t < 300; ++t)
    for (int j = 0; j < 2; ++j) mean_field.values(t, j) = std::pow(model.mean_at(t, j), 2);
  const auto resid = detrend(mean_field, model);
  CHECK(resid.values.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("retrend is the exact inverse of detrend", "[harmonics]") {
  Rng rng(7);
  auto f = make_field(400, 3, 5);
  for (Eigen::Index t = 0; t < 400; ++t)
    for (int j = 0; j < 3; ++j)
      f.values(t, j) =
          std::pow(2.2 + 0.3 * std::cos(kTwoPi * (5 + t) / 24.0) + 0.25 * rng.normal(), 2);
  const auto model = fit_harmonics(f, {24.0});

  // detrend then retrend reproduces a strictly positive field
  const auto resid = detrend(f, model);
  const auto back = retrend(resid, model);
  CHECK(back.truncated == 0);
  CHECK((back.field.values - f.values).cwiseAbs().maxCoeff() < 1e-10);

  // retrend then detrend is the identity on residuals
  SpaceTimeField arbitrary = resid;
  for (Eigen::Index t = 0; t < 400; ++t)
    for (int j = 0; j < 3; ++j) arbitrary.values(t, j) = rng.uniform(-1.5, 1.5);
  const auto z = retrend(arbitrary, model);
  REQUIRE(z.truncated == 0);
  const auto again = detrend(z.field, model);
  CHECK((again.values - arbitrary.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("retrend evaluates the squared mean structure", "[harmonics]") {
  HarmonicModel model;
  model.periods = {24.0};
  model.locations = {{"A", 0, 0}};
  model.coefficients.resize(3, 1);
  model.coefficients << 3.0, 0.0, 0.0;
  model.scale.resize(1);
  model.scale << 0.5;

  SpaceTimeField resid;
  resid.locations = model.locations;
  resid.start = 0;
  resid.values.resize(2, 1);
  resid.values << 0.0, 1.0;

  const auto z = retrend(resid, model);
  CHECK(z.field.values(0, 0) == Catch::Approx(9.0));        // (3 + 0)^2
  CHECK(z.field.values(1, 0) == Catch::Approx(12.25));      // (3 + 0.5)^2... (3.5)^2
  CHECK(z.truncated == 0);

  // strongly negative residual is clipped at zero and counted
  resid.values(1, 0) = -100.0;
  const auto clipped = retrend(resid, model);
  CHECK(clipped.field.values(1, 0) == 0.0);
  CHECK(clipped.truncated == 1);
}

TEST_CASE("retrend with mean 2 and gamma 0.5 at residual 1 gives 6.25", "[harmonics]") {
  HarmonicModel model;
  model.periods = {};
  model.locations = {{"A", 0, 0}};
  model.coefficients.resize(1, 1);
  model.coefficients << 2.0;
  model.scale.resize(1);
  model.scale << 0.5;
  SpaceTimeField resid;
  resid.locations = model.locations;
  resid.start = 0;
  resid.values.resize(1, 1);
  resid.values << 1.0;
  CHECK(retrend(resid, model).field.values(0, 0) == Catch::Approx(6.25));
}

TEST_CASE("harmonic error paths", "[harmonics]") {
  auto f = make_field(50, 1);
  f.values.setConstant(1.0);
  f.values(3, 0) = -0.5;
  CHECK_THROWS_AS(fit_harmonics(f, {24.0}), Error);

  auto ok = make_field(50, 1);
  ok.values.setConstant(1.0);
  try {
    // a 1-hour period aliases onto the intercept at hourly sampling
    fit_harmonics(ok, {24.0, 1.0});
    FAIL("expected singular-design error");
  } catch (const Error& e) {
    CHECK(e.kind() == "singular-design");
    CHECK(std::string(e.what()).find("1.0") != std::string::npos);
  }

  const auto model = fit_harmonics(ok, {24.0});
  auto other = make_field(50, 2);
  other.values.setConstant(1.0);
  CHECK_THROWS_AS(detrend(other, model), Error);
}
