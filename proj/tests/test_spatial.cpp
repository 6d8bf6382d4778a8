#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <set>

#include "sesn/bessel.hpp"
#include "sesn/covariance.hpp"
#include "sesn/knots.hpp"
#include "sesn/kriging.hpp"
#include "sesn/rng.hpp"

using namespace sesn;

namespace {

// Straight-line transcription of the nonstationary Matern covariance,
// written against Eigen's generic determinant/inverse so that it shares no
// matrix code with the implementation. Used as the oracle below.
double oracle_covariance(const Location& s, const Location& sp, const CovarianceModel& model) {
  auto mix = [&](double x, double y, double& sill, double& nu, double& nugget,
                 Eigen::Matrix2d& sigma) {
    double wsum = 0;
    sill = nu = nugget = 0;
    sigma.setZero();
    for (const auto& c : model.components) {
      const double w = std::exp(-((x - c.cx) * (x - c.cx) + (y - c.cy) * (y - c.cy)) /
                                (2.0 * model.bandwidth * model.bandwidth));
      wsum += w;
      sill += w * c.sill;
      nu += w * c.smoothness;
      nugget += w * c.nugget;
      sigma += w * c.kernel;
    }
    sill /= wsum;
    nu /= wsum;
    nugget /= wsum;
    sigma /= wsum;
  };
  double sill_s, nu_s, nug_s, sill_p, nu_p, nug_p;
  Eigen::Matrix2d sig_s, sig_p;
  mix(s.x, s.y, sill_s, nu_s, nug_s, sig_s);
  mix(sp.x, sp.y, sill_p, nu_p, nug_p, sig_p);

  const Eigen::Matrix2d avg = (sig_s + sig_p) / 2.0;
  const double prefactor = std::pow(sig_s.determinant(), 0.25) *
                           std::pow(sig_p.determinant(), 0.25) /
                           std::sqrt(avg.determinant());
  const Eigen::Vector2d h(s.x - sp.x, s.y - sp.y);
  const double q2 = h.transpose() * avg.inverse() * h;
  const double q = std::sqrt(q2);
  const double nu = (nu_s + nu_p) / 2.0;
  const double rs =
      q == 0.0 ? 1.0
               : std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(q, nu) * bessel_k(nu, q);
  double c = std::sqrt(sill_s) * std::sqrt(sill_p) * prefactor * rs;
  if (s.x == sp.x && s.y == sp.y) c += nug_s;
  return c;
}

CovarianceModel two_component_model() {
  CovarianceModel model;
  model.bandwidth = 1.5;
  CovarianceComponent a;
  a.cx = 0.0;
  a.cy = 0.0;
  a.sill = 1.2;
  a.smoothness = 0.8;
  a.kernel << 0.5, 0.1, 0.1, 0.9;
  a.nugget = 0.05;
  CovarianceComponent b;
  b.cx = 2.0;
  b.cy = 1.0;
  b.sill = 0.7;
  b.smoothness = 1.9;
  b.kernel << 1.4, -0.2, -0.2, 0.6;
  b.nugget = 0.01;
  model.components = {a, b};
  return model;
}

CovarianceModel stationary_model(double sill, double nu, const Eigen::Matrix2d& sigma,
                                 double nugget) {
  CovarianceModel model;
  model.bandwidth = 2.0;
  CovarianceComponent c;
  c.cx = 0.5;
  c.cy = 0.5;
  c.sill = sill;
  c.smoothness = nu;
  c.kernel = sigma;
  c.nugget = nugget;
  model.components = {c};
  return model;
}

SpaceTimeField grid_field(int side, double extent, int n_times, std::uint64_t seed) {
  SpaceTimeField f;
  Rng rng(seed);
  for (int iy = 0; iy < side; ++iy)
    for (int ix = 0; ix < side; ++ix)
      f.locations.push_back({"G" + std::to_string(iy * side + ix),
                             extent * (ix + 0.5) / side, extent * (iy + 0.5) / side});
  f.start = 0;
  f.values.resize(n_times, side * side);
  for (Eigen::Index t = 0; t < f.values.rows(); ++t)
    for (Eigen::Index j = 0; j < f.values.cols(); ++j) f.values(t, j) = rng.normal();
  return f;
}

}  // namespace

TEST_CASE("knot selection: threshold above the maximum leaves only grid knots", "[spatial]") {
  auto f = grid_field(5, 1.0, 10, 1);
  f.values.setConstant(3.0);
  const auto knots = select_knots(f, 0.4, 100.0, 0.01);
  CHECK(knots.size() > 0);
  for (auto tag : knots.tags) CHECK(tag == KnotTag::Grid);
}

TEST_CASE("knot selection keeps the windier of two co-located candidates", "[spatial]") {
  SpaceTimeField f;
  f.locations = {{"A", 0.0, 0.0}, {"B", 0.5, 0.5}, {"C", 0.501, 0.501}};
  f.start = 0;
  f.values.resize(4, 3);
  f.values.col(0).setConstant(1.0);
  f.values.col(1).setConstant(8.0);  // windier
  f.values.col(2).setConstant(7.0);  // 0.001 degrees away, below min_sep
  const auto knots = select_knots(f, 10.0, 6.0, 0.005);

  bool b_high = false, c_high = false;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (knots.tags[i] != KnotTag::HighWind) continue;
    if (f.locations[static_cast<std::size_t>(knots.indices[i])].id == "B") b_high = true;
    if (f.locations[static_cast<std::size_t>(knots.indices[i])].id == "C") c_high = true;
  }
  CHECK(b_high);
  CHECK_FALSE(c_high);
}

TEST_CASE("knot indices are unique and high-wind tags win on overlap", "[spatial]") {
  auto f = grid_field(4, 1.0, 10, 2);
  f.values.setConstant(2.0);
  f.values.col(5).setConstant(9.0);
  const auto knots = select_knots(f, 0.5, 6.0, 0.01);
  std::set<Eigen::Index> seen(knots.indices.begin(), knots.indices.end());
  CHECK(seen.size() == knots.indices.size());
  bool found = false;
  for (std::size_t i = 0; i < knots.size(); ++i)
    if (knots.indices[i] == 5) {
      found = true;
      CHECK(knots.tags[i] == KnotTag::HighWind);
    }
  CHECK(found);
}

TEST_CASE("covariance diagonal is sill plus nugget", "[spatial]") {
  const auto model = two_component_model();
  const Location s{"p", 0.3, 0.4};
  const auto p = local_params(s.x, s.y, model);
  CHECK(covariance(s, s, model) == Catch::Approx(p.sill + p.nugget).epsilon(1e-14));
}

TEST_CASE("single-component model reduces to the stationary Matern", "[spatial]") {
  Eigen::Matrix2d sigma;
  sigma << 0.8, 0.2, 0.2, 1.1;
  const auto model = stationary_model(1.3, 1.2, sigma, 0.07);
  const Location a{"a", 0.1, 0.9}, b{"b", 1.4, 0.3};
  const Eigen::Vector2d h(a.x - b.x, a.y - b.y);
  const double expected = 1.3 * matern_stationary(h, sigma, 1.2);
  CHECK(covariance(a, b, model) == Catch::Approx(expected).margin(1e-12));
  CHECK(covariance(a, a, model) == Catch::Approx(1.3 + 0.07).margin(1e-12));
}

TEST_CASE("covariance matches the direct formula transcription", "[spatial]") {
  const auto model = two_component_model();
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const Location a{"a", rng.uniform(-1, 3), rng.uniform(-1, 2)};
    const Location b{"b", rng.uniform(-1, 3), rng.uniform(-1, 2)};
    CHECK(covariance(a, b, model) == Catch::Approx(oracle_covariance(a, b, model)).margin(1e-12));
  }
}

TEST_CASE("covariance is symmetric", "[spatial]") {
  const auto model = two_component_model();
  Rng rng(32);
  for (int trial = 0; trial < 25; ++trial) {
    const Location a{"a", rng.uniform(-1, 3), rng.uniform(-1, 2)};
    const Location b{"b", rng.uniform(-1, 3), rng.uniform(-1, 2)};
    CHECK(covariance(a, b, model) == covariance(b, a, model));
  }
}

TEST_CASE("covariance matrices are positive semidefinite", "[spatial]") {
  const auto model = two_component_model();
  Rng rng(33);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 5 + static_cast<int>(rng.below(36));
    std::vector<Location> locs;
    for (int i = 0; i < n; ++i)
      locs.push_back({"r" + std::to_string(i), rng.uniform(-1, 3), rng.uniform(-1, 2)});
    const Eigen::MatrixXd K = covariance_matrix(locs, model);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
  }
}

TEST_CASE("kriging weights are exact at the knots when the nugget is zero", "[spatial]") {
  Eigen::Matrix2d sigma;
  sigma << 0.5, 0.0, 0.0, 0.5;
  const auto model = stationary_model(1.0, 1.0, sigma, 0.0);

  std::vector<Location> all;
  for (int i = 0; i < 12; ++i)
    all.push_back({"p" + std::to_string(i), 0.17 * i, 0.6 - 0.08 * i});
  std::vector<Location> knots = {all[2], all[5], all[9]};
  const auto w = kriging_weights(all, knots, model);

  CHECK(std::abs(w.weights(2, 0) - 1.0) < 1e-8);
  CHECK(std::abs(w.weights(5, 1) - 1.0) < 1e-8);
  CHECK(std::abs(w.weights(9, 2) - 1.0) < 1e-8);
  CHECK(std::abs(w.weights(2, 1)) < 1e-8);
  CHECK(std::abs(w.weights(2, 2)) < 1e-8);

  // interpolation reproduces knot values exactly
  Eigen::VectorXd y(3);
  y << 1.4, -0.6, 0.9;
  const Eigen::VectorXd full = w.apply(y);
  CHECK(full(2) == Catch::Approx(1.4).margin(1e-8));
  CHECK(full(5) == Catch::Approx(-0.6).margin(1e-8));
  CHECK(full(9) == Catch::Approx(0.9).margin(1e-8));
}

TEST_CASE("single-knot prediction follows the scalar kriging formula", "[spatial]") {
  Eigen::Matrix2d sigma;
  sigma << 0.3, 0.05, 0.05, 0.4;
  const auto model = stationary_model(0.9, 1.5, sigma, 0.02);
  const Location star{"star", 0.4, 0.7};
  const Location s{"s", 1.1, 0.2};
  const auto w = kriging_weights({s}, {star}, model);
  const double expected = covariance(s, star, model) / covariance(star, star, model);
  CHECK(w.weights(0, 0) == Catch::Approx(expected).margin(1e-10));
}

TEST_CASE("a location far beyond the correlation range predicts zero", "[spatial]") {
  Eigen::Matrix2d sigma;
  sigma << 0.5, 0.0, 0.0, 0.5;
  const auto model = stationary_model(1.0, 0.5, sigma, 0.0);
  std::vector<Location> knots = {{"k0", 0.0, 0.0}, {"k1", 1.0, 0.0}};
  const Location far{"far", 2000.0, 2000.0};
  const auto w = kriging_weights({far}, knots, model);
  Eigen::VectorXd y(2);
  y << 3.0, -2.0;
  CHECK(std::abs(w.apply(y)(0)) < 1e-10 * y.norm());
}

TEST_CASE("kriging failure names the nearest duplicate pair", "[spatial]") {
  Eigen::Matrix2d sigma;
  sigma << 0.5, 0.0, 0.0, 0.5;
  const auto model = stationary_model(1.0, 1.0, sigma, 0.0);
  // exact duplicate coordinates make K singular beyond jitter repair
  std::vector<Location> knots = {{"dupA", 0.2, 0.2}, {"dupB", 0.2, 0.2}, {"k", 1.0, 1.0}};
  try {
    kriging_weights(knots, knots, model);
    FAIL("expected numeric error");
  } catch (const Error& e) {
    CHECK(e.kind() == "numeric");
    CHECK(std::string(e.what()).find("dupA") != std::string::npos);
    CHECK(std::string(e.what()).find("dupB") != std::string::npos);
  }

  // with a positive nugget the same pair factorizes fine
  auto with_nugget = model;
  with_nugget.components[0].nugget = 0.05;
  CHECK(kriging_weights(knots, knots, with_nugget).weights.allFinite());
}

TEST_CASE("local MLE recovers known stationary parameters", "[spatial][slow]") {
  // simulate 500 replicates of a Matern field on 100 locations
  Rng rng(41);
  std::vector<Location> locs;
  for (int i = 0; i < 100; ++i)
    locs.push_back({"s" + std::to_string(i), rng.uniform(0, 1), rng.uniform(0, 1)});
  Eigen::Matrix2d sigma;
  sigma << 0.5, 0.0, 0.0, 0.5;
  const double sill = 1.0, nu = 1.0;

  Eigen::MatrixXd C(100, 100);
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      const Eigen::Vector2d h(locs[i].x - locs[j].x, locs[i].y - locs[j].y);
      C(i, j) = sill * matern_stationary(h, sigma, nu);
    }
  C.diagonal().array() += 1e-10;
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(C).matrixL();

  SpaceTimeField field;
  field.locations = locs;
  field.start = 0;
  field.values.resize(500, 100);
  for (int t = 0; t < 500; ++t) {
    Eigen::VectorXd z(100);
    for (int i = 0; i < 100; ++i) z(i) = rng.normal();
    field.values.row(t) = (L * z).transpose();
  }

  CovarianceFitOptions opt;
  opt.seed = 7;
  const Location center{"c", 0.5, 0.5};
  const auto model = fit_covariance(field, {center}, 2.0, 1.0, opt);
  REQUIRE(model.components.size() == 1);
  const auto& comp = model.components[0];
  CHECK(std::abs(comp.sill - sill) / sill < 0.15);
  CHECK(std::abs(comp.smoothness - nu) / nu < 0.15);
  CHECK(std::abs(comp.kernel(0, 0) - 0.5) / 0.5 < 0.15);
  CHECK(std::abs(comp.kernel(1, 1) - 0.5) / 0.5 < 0.15);
  CHECK(std::abs(comp.kernel(0, 1)) < 0.1);
  CHECK(comp.nugget < 0.05);
}

TEST_CASE("white-noise residuals fit nugget-dominated", "[spatial][slow]") {
  auto field = grid_field(7, 1.0, 300, 43);
  CovarianceFitOptions opt;
  opt.seed = 11;
  const Location center{"c", 0.5, 0.5};
  const auto model = fit_covariance(field, {center}, 2.0, 1.0, opt);
  CHECK(model.components[0].nugget > model.components[0].sill);
}

TEST_CASE("minimum data case runs: one replicate at 30 locations", "[spatial]") {
  auto field = grid_field(6, 1.0, 1, 44);  // 36 locations, 1 time point
  CovarianceFitOptions opt;
  opt.seed = 12;
  opt.max_iter = 60;  // smoke check only
  const Location center{"c", 0.5, 0.5};
  const auto model = fit_covariance(field, {center}, 2.0, 1.0, opt);
  CHECK(model.components.size() == 1);
  CHECK(model.components[0].sill > 0.0);
}

TEST_CASE("too few neighbors is a configuration error", "[spatial]") {
  auto field = grid_field(4, 1.0, 10, 45);  // 16 locations < 30
  const Location center{"c", 0.5, 0.5};
  CHECK_THROWS_AS(fit_covariance(field, {center}, 2.0, 1.0), Error);
}
