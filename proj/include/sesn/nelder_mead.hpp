#ifndef SESN_NELDER_MEAD_HPP
#define SESN_NELDER_MEAD_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace sesn {

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimizer (Nelder-Mead with the standard
/// reflection/expansion/contraction/shrink coefficients). Objectives may
/// return +inf to reject a point.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x0, double step = 0.5,
                                    double ftol = 1e-9, int max_iter = 2000) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (int i = 0; i < n; ++i) pts[i + 1](i) += (x0(i) != 0.0 ? step * std::abs(x0(i)) : step);
  for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  NelderMeadResult res;
  std::vector<int> order(n + 1);
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order[0], worst = order[n], second_worst = order[n - 1];

    if (std::abs(vals[worst] - vals[best]) <=
        ftol * (std::abs(vals[best]) + std::abs(vals[worst]) + 1e-30)) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= n;

    const Eigen::VectorXd refl = centroid + (centroid - pts[worst]);
    const double f_refl = f(refl);
    if (f_refl < vals[best]) {
      const Eigen::VectorXd expa = centroid + 2.0 * (centroid - pts[worst]);
      const double f_expa = f(expa);
      if (f_expa < f_refl) {
        pts[worst] = expa;
        vals[worst] = f_expa;
      } else {
        pts[worst] = refl;
        vals[worst] = f_refl;
      }
    } else if (f_refl < vals[second_worst]) {
      pts[worst] = refl;
      vals[worst] = f_refl;
    } else {
      const Eigen::VectorXd contr = centroid + 0.5 * (pts[worst] - centroid);
      const double f_contr = f(contr);
      if (f_contr < vals[worst]) {
        pts[worst] = contr;
        vals[worst] = f_contr;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }

  int arg = 0;
  for (int i = 1; i <= n; ++i)
    if (vals[i] < vals[arg]) arg = i;
  res.x = pts[arg];
  res.value = vals[arg];
  return res;
}

}  // namespace sesn

#endif  // SESN_NELDER_MEAD_HPP
