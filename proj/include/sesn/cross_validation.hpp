#ifndef SESN_CROSS_VALIDATION_HPP
#define SESN_CROSS_VALIDATION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sesn/errors.hpp"
#include "sesn/forecast.hpp"

namespace sesn {

/// Hyperparameter search grid; every axis with more than one entry is
/// swept, the cartesian product expanding in the fixed order
/// n_h, m, phi, delta, lambda, a_w, a_u, pi_w, pi_u.
struct EsnGrid {
  std::vector<int> n_h = {2500};
  std::vector<int> m = {1};
  std::vector<double> phi = {1.0};
  std::vector<double> delta = {0.9};
  std::vector<double> lambda = {0.15};
  std::vector<double> a_w = {0.05};
  std::vector<double> a_u = {0.01};
  std::vector<double> pi_w = {0.1};
  std::vector<double> pi_u = {0.01};

  std::size_t size() const {
    return n_h.size() * m.size() * phi.size() * delta.size() * lambda.size() * a_w.size() *
           a_u.size() * pi_w.size() * pi_u.size();
  }

  std::vector<EsnSpec> expand(std::uint64_t seed) const {
    std::vector<EsnSpec> specs;
    specs.reserve(size());
    for (int v_nh : n_h)
      for (int v_m : m)
        for (double v_phi : phi)
          for (double v_delta : delta)
            for (double v_lambda : lambda)
              for (double v_aw : a_w)
                for (double v_au : a_u)
                  for (double v_pw : pi_w)
                    for (double v_pu : pi_u) {
                      EsnSpec s;
                      s.n_h = v_nh;
                      s.m = v_m;
                      s.phi = v_phi;
                      s.delta = v_delta;
                      s.lambda = v_lambda;
                      s.a_w = v_aw;
                      s.a_u = v_au;
                      s.pi_w = v_pw;
                      s.pi_u = v_pu;
                      s.seed = seed;
                      specs.push_back(s);
                    }
    return specs;
  }
};

struct CvRow {
  EsnSpec spec;
  double mse = 0.0;
};

struct CvResult {
  EsnSpec best;
  std::vector<CvRow> table;  // grid order (subsampled when budgeted)
};

/// Exhaustive grid search by horizon-1 ensemble-mean MSE on the
/// validation block. A nonzero budget caps the evaluations by
/// deterministic equally spaced subsampling of the grid. Ties prefer the
/// smaller n_h, then the smaller lambda, then the earlier grid entry.
inline CvResult cross_validate(const EsnGrid& grid, const Eigen::MatrixXd& train_y,
                               const Eigen::MatrixXd& val_y, int members, int burn,
                               std::uint64_t base_seed, std::size_t budget = 0) {
  if (grid.size() == 0) throw configuration_error("cross_validate: empty grid");
  if (val_y.rows() < 1) throw configuration_error("cross_validate: empty validation split");

  std::vector<EsnSpec> specs = grid.expand(base_seed);
  if (budget > 0 && budget < specs.size()) {
    std::vector<EsnSpec> kept;
    kept.reserve(budget);
    for (std::size_t i = 0; i < budget; ++i)
      kept.push_back(specs[i * specs.size() / budget]);
    specs.swap(kept);
  }

  CvResult result;
  result.table.resize(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) {
    const auto ens = run_ensemble(specs[i], members, train_y, val_y, /*horizons=*/1, burn);
    result.table[i] = {specs[i], mse(val_y, ens.mean[0])};
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.table.size(); ++i) {
    const auto& a = result.table[i];
    const auto& b = result.table[best];
    if (a.mse < b.mse ||
        (a.mse == b.mse &&
         (a.spec.n_h < b.spec.n_h ||
          (a.spec.n_h == b.spec.n_h && a.spec.lambda < b.spec.lambda))))
      best = i;
  }
  result.best = result.table[best].spec;
  return result;
}

}  // namespace sesn

#endif  // SESN_CROSS_VALIDATION_HPP
