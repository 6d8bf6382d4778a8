#ifndef SESN_BESSEL_HPP
#define SESN_BESSEL_HPP

#include <cmath>
#include <cstddef>
#include <string>

#include "sesn/errors.hpp"

namespace sesn {

namespace detail {

// Even/odd parts of the reciprocal gamma function around 1,
//   gam1(mu) = [1/Gamma(1-mu) - 1/Gamma(1+mu)] / (2 mu),   gam1(0) = -euler
//   gam2(mu) = [1/Gamma(1-mu) + 1/Gamma(1+mu)] / 2,
// evaluated from the Taylor series of 1/Gamma(1+x), |mu| <= 1/2. Direct
// tgamma evaluation cancels catastrophically near mu = 0.
inline void recip_gamma_parts(double mu, double& gam1, double& gam2,
                              double& one_over_gamma_1p, double& one_over_gamma_1m) {
  // Coefficients of 1/Gamma(1+x) = sum b_k x^k (Abramowitz & Stegun 6.1.34).
  static const double b[] = {
      1.00000000000000000000,  0.57721566490153286061,  -0.65587807152025388108,
      -0.04200263503409523553, 0.16653861138229148950,  -0.04219773455554433675,
      -0.00962197152787697356, 0.00721894324666309954,  -0.00116516759185906511,
      -0.00021524167411495097, 0.00012805028238811619,  -0.00002013485478078824,
      -0.00000125049348214267, 0.00000113302723198170,  -0.00000020563384169776,
      0.00000000611609510448,  0.00000000500200764447,  -0.00000000118127457049,
      0.00000000010434267117,  0.00000000000778226344,  -0.00000000000369680562,
      0.00000000000051003703,  -0.00000000000002058326, -0.00000000000000534812,
      0.00000000000000122678,  -0.00000000000000011813};
  constexpr std::size_t nb = sizeof(b) / sizeof(b[0]);
  const double mu2 = mu * mu;
  double even = 0.0, odd = 0.0, p = 1.0;  // p = mu^(2j)
  for (std::size_t j = 0; 2 * j < nb; ++j, p *= mu2) {
    even += b[2 * j] * p;
    if (2 * j + 1 < nb) odd += b[2 * j + 1] * p;
  }
  // 1/Gamma(1 +- mu) = even +- mu*odd
  one_over_gamma_1p = even + mu * odd;
  one_over_gamma_1m = even - mu * odd;
  gam1 = -odd;
  gam2 = even;
}

}  // namespace detail

/// Modified Bessel function of the second kind K_nu(x) for nu >= 0, x > 0.
/// Temme's series for x <= 2, Steed's continued fraction CF2 for x > 2,
/// with upward recurrence in the order.
inline double bessel_k(double nu, double x) {
  if (!(nu >= 0.0) || !std::isfinite(nu))
    throw domain_error("bessel_k: order must be >= 0, got " + std::to_string(nu));
  if (!(x > 0.0))
    throw domain_error("bessel_k: argument must be > 0, got " + std::to_string(x));

  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 20000;
  constexpr double kPi = 3.14159265358979323846264338328;

  const int nl = static_cast<int>(nu + 0.5);  // steps of upward recurrence
  const double mu = nu - nl;                  // |mu| <= 1/2
  const double mu2 = mu * mu;

  double k_mu, k_mu1;  // K_mu(x), K_{mu+1}(x)

  if (x <= 2.0) {
    // Temme's series.
    double gam1, gam2, gampl, gammi;
    detail::recip_gamma_parts(mu, gam1, gam2, gampl, gammi);
    const double lnhx = std::log(2.0 / x);  // -ln(x/2)
    const double sigma = mu * lnhx;
    const double fact = (std::abs(mu) < 1e-14) ? 1.0 : (kPi * mu) / std::sin(kPi * mu);
    const double sinhfac = (std::abs(sigma) < 1e-14) ? 1.0 : std::sinh(sigma) / sigma;
    double f = fact * (gam1 * std::cosh(sigma) + gam2 * sinhfac * lnhx);
    const double e = std::exp(sigma);  // (2/x)^mu
    double p = 0.5 * e / gampl;        // 0.5 (2/x)^mu  Gamma(1+mu)
    double q = 0.5 / (e * gammi);      // 0.5 (x/2)^mu  Gamma(1-mu)
    double c = 1.0;
    const double d = 0.25 * x * x;
    double sum = f, sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
      f = (i * f + p + q) / (i * i - mu2);
      c *= d / i;
      p /= (i - mu);
      q /= (i + mu);
      const double del = c * f;
      sum += del;
      sum1 += c * (p - i * f);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter) throw numeric_error("bessel_k: series failed to converge");
    k_mu = sum;
    k_mu1 = sum1 * (2.0 / x);
  } else {
    // Steed's continued fraction CF2.
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    int i = 2;
    for (; i <= kMaxIter; ++i) {
      a -= 2 * (i - 1);
      c = -a * c / i;
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < kEps) break;
    }
    if (i > kMaxIter) throw numeric_error("bessel_k: continued fraction failed to converge");
    h = a1 * h;
    k_mu = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
    k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
  }

  for (int j = 1; j <= nl; ++j) {
    const double k_next = (mu + j) * (2.0 / x) * k_mu1 + k_mu;
    k_mu = k_mu1;
    k_mu1 = k_next;
  }
  return k_mu;
}

}  // namespace sesn

#endif  // SESN_BESSEL_HPP
