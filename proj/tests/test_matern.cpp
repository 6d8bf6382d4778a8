#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sesn/bessel.hpp"
#include "sesn/matern.hpp"

using namespace sesn;

TEST_CASE("bessel_k reproduces the half-integer closed forms", "[matern]") {
  const double pi = 3.14159265358979323846;
  for (double x : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
    const double k12 = std::sqrt(pi / (2 * x)) * std::exp(-x);
    CHECK(bessel_k(0.5, x) == Catch::Approx(k12).epsilon(1e-12));
    CHECK(bessel_k(1.5, x) == Catch::Approx(k12 * (1 + 1 / x)).epsilon(1e-12));
    CHECK(bessel_k(2.5, x) == Catch::Approx(k12 * (1 + 3 / x + 3 / (x * x))).epsilon(1e-12));
  }
}

TEST_CASE("bessel_k agrees with the standard library for general order", "[matern]") {
  for (double nu : {0.05, 0.3, 1.0, 1.7, 3.3, 7.5, 10.0})
    for (double x : {0.02, 0.3, 1.0, 2.5, 8.0}) {
      const double ref = std::cyl_bessel_k(nu, x);
      CHECK(bessel_k(nu, x) == Catch::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("bessel_k rejects bad arguments", "[matern]") {
  CHECK_THROWS_AS(bessel_k(-1.0, 1.0), Error);
  CHECK_THROWS_AS(bessel_k(1.0, 0.0), Error);
  CHECK_THROWS_AS(bessel_k(1.0, -2.0), Error);
}

TEST_CASE("matern correlation is 1 at zero lag", "[matern]") {
  CHECK(matern_correlation(0.0, 0.5) == 1.0);
  CHECK(matern_correlation(0.0, 2.7) == 1.0);
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  CHECK(matern_stationary(Eigen::Vector2d::Zero(), I, 1.3) == 1.0);
}

TEST_CASE("matern nu = 1/2 is the exponential correlation", "[matern]") {
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  for (double q : {0.01, 0.1, 1.0, 5.0})
    CHECK(matern_correlation(q, 0.5) == Catch::Approx(std::exp(-q)).margin(1e-10));
  const Eigen::Vector2d h(1.0, 0.0);
  CHECK(matern_stationary(h, I, 0.5) == Catch::Approx(std::exp(-1.0)).margin(1e-12));
}

TEST_CASE("matern nu = 3/2 matches (1+q) exp(-q)", "[matern]") {
  for (double q : {0.01, 0.1, 1.0, 5.0})
    CHECK(matern_correlation(q, 1.5) == Catch::Approx((1 + q) * std::exp(-q)).margin(1e-10));
}

TEST_CASE("anisotropic distance uses the kernel inverse", "[matern]") {
  Eigen::Matrix2d sigma;
  sigma << 4.0, 0.0, 0.0, 1.0;
  // h = (2, 0): q = sqrt(4/4) = 1
  CHECK(matern_stationary(Eigen::Vector2d(2.0, 0.0), sigma, 0.5) ==
        Catch::Approx(std::exp(-1.0)).margin(1e-12));
  // h = (0, 1): q = 1 as well
  CHECK(matern_stationary(Eigen::Vector2d(0.0, 1.0), sigma, 0.5) ==
        Catch::Approx(std::exp(-1.0)).margin(1e-12));
}

TEST_CASE("matern decreases monotonically along a ray", "[matern]") {
  Eigen::Matrix2d sigma;
  sigma << 1.0, 0.3, 0.3, 2.0;
  for (double nu : {0.2, 0.5, 1.0, 2.5, 6.0}) {
    double prev = 1.0 + 1e-15;
    for (double r = 0.05; r < 8.0; r += 0.05) {
      const double v = matern_stationary(Eigen::Vector2d(0.6 * r, 0.8 * r), sigma, nu);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("degenerate smoothness and kernels are rejected", "[matern]") {
  CHECK_THROWS_AS(matern_correlation(1.0, 0.0), Error);
  CHECK_THROWS_AS(matern_correlation(1.0, -1.0), Error);
  Eigen::Matrix2d bad;
  bad << 1.0, 2.0, 2.0, 1.0;  // indefinite
  CHECK_THROWS_AS(matern_stationary(Eigen::Vector2d(1, 0), bad, 0.5), Error);
}
