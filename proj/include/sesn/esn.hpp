#ifndef SESN_ESN_HPP
#define SESN_ESN_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sesn/errors.hpp"
#include "sesn/rng.hpp"

namespace sesn {

/// Echo state network hyperparameters. Defaults are the cross-validated
/// wind-field values; the ridge penalty and sizes are retuned per problem.
struct EsnSpec {
  int n_h = 2500;        // reservoir size
  int m = 1;             // input lag count
  double phi = 1.0;      // leaking rate, (0, 1]
  double delta = 0.9;    // spectral scaling of W
  double a_w = 0.05;     // magnitude of nonzero entries of W
  double a_u = 0.01;     // magnitude of nonzero entries of U
  double pi_w = 0.1;     // connection probability in W
  double pi_u = 0.01;    // connection probability in U
  double lambda = 0.15;  // ridge penalty
  std::uint64_t seed = 0;

  // phi = 0, pi = 0, and a = 0 are degenerate but well defined (frozen
  // state, empty matrix, zero weights), so the checks admit the closed
  // boundary.
  void validate() const {
    if (n_h < 1) throw configuration_error("esn: n_h must be >= 1");
    if (m < 1) throw configuration_error("esn: m must be >= 1");
    if (phi < 0.0 || phi > 1.0) throw configuration_error("esn: phi must be in [0, 1]");
    if (!(delta > 0.0)) throw configuration_error("esn: delta must be > 0");
    if (a_w < 0.0 || a_u < 0.0)
      throw configuration_error("esn: weight magnitudes must be >= 0");
    if (pi_w < 0.0 || pi_w > 1.0 || pi_u < 0.0 || pi_u > 1.0)
      throw configuration_error("esn: connection probabilities must be in [0, 1]");
    if (lambda < 0.0) throw configuration_error("esn: lambda must be >= 0");
  }

  /// Input dimension for output size n_star: intercept plus m stacked lags.
  Eigen::Index input_dim(Eigen::Index n_star) const {
    return 1 + static_cast<Eigen::Index>(m) * n_star;
  }
};

/// Frozen random weights. Entries are Bernoulli-masked uniforms; lambda_w
/// is the spectral radius of W used by the delta / |lambda_W| scaling.
struct ReservoirMatrices {
  Eigen::SparseMatrix<double> W;  // n_h x n_h
  Eigen::SparseMatrix<double> U;  // n_h x input_dim
  double lambda_w = 0.0;

  /// delta / |lambda_W|, defined as 0 for an all-zero W.
  double recurrence_scale(double delta) const {
    return lambda_w < 1e-12 ? 0.0 : delta / lambda_w;
  }
};

/// Trained readout, stacked as B = [V1; V2] so y = B' (h, h.*h).
struct ReadoutMap {
  Eigen::MatrixXd B;  // (2 n_h) x n_star

  Eigen::Index n_h() const { return B.rows() / 2; }
  Eigen::Index output_dim() const { return B.cols(); }
};

struct ReservoirState {
  Eigen::VectorXd h;
  std::int64_t t = -1;  // time index this state corresponds to
};

namespace detail {

/// Spectral radius via block-2 orthogonal iteration (handles the complex
/// conjugate pairs that dominate random sign matrices), with a dense
/// eigensolve fallback for small or stubborn cases.
inline double spectral_radius(const Eigen::SparseMatrix<double>& W, double tol = 1e-10,
                              int max_iter = 10000) {
  const Eigen::Index n = W.rows();
  if (n == 0) return 0.0;
  if (W.nonZeros() == 0) return 0.0;

  auto dense_radius = [&]() {
    const Eigen::MatrixXd D(W);
    Eigen::EigenSolver<Eigen::MatrixXd> es(D, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  };
  if (n <= 64) return dense_radius();

  Eigen::MatrixXd Q(n, 2);
  Rng rng(0x5e5eed);  // fixed iteration seed; the result is a matrix property
  for (Eigen::Index i = 0; i < n; ++i) {
    Q(i, 0) = rng.normal();
    Q(i, 1) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr0(Q);
  Q = qr0.householderQ() * Eigen::MatrixXd::Identity(n, 2);

  double prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::MatrixXd Z = W * Q;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
    Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, 2);
    // eigenvalues of the projected 2x2 give the dominant modulus
    const Eigen::Matrix2d H = Q.transpose() * (W * Q);
    const double tr = H(0, 0) + H(1, 1);
    const double det = H(0, 0) * H(1, 1) - H(0, 1) * H(1, 0);
    const double disc = tr * tr / 4.0 - det;
    double rho;
    if (disc >= 0.0) {
      const double r = std::sqrt(disc);
      rho = std::max(std::abs(tr / 2.0 + r), std::abs(tr / 2.0 - r));
    } else {
      rho = std::sqrt(det);  // complex pair: |lambda| = sqrt(det)
    }
    if (it > 0 && std::abs(rho - prev) <= tol * std::max(1.0, std::abs(rho))) return rho;
    prev = rho;
  }
  if (n <= 4096) return dense_radius();
  return prev;
}

}  // namespace detail

/// Draws W and U for the given spec: each entry is zero with probability
/// 1 - pi, otherwise Uniform(-a, a). Deterministic in the seed; W is drawn
/// entirely before U, both in column-major order.
inline ReservoirMatrices generate_matrices(const EsnSpec& spec, Eigen::Index input_dim) {
  spec.validate();
  ReservoirMatrices mats;
  Rng rng(spec.seed);

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> trips;

  const Eigen::Index n = spec.n_h;
  trips.reserve(static_cast<std::size_t>(static_cast<double>(n) * n * spec.pi_w * 1.2) + 16);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (rng.bernoulli(spec.pi_w)) trips.emplace_back(i, j, rng.uniform(-spec.a_w, spec.a_w));
  mats.W.resize(n, n);
  mats.W.setFromTriplets(trips.begin(), trips.end());

  trips.clear();
  for (Eigen::Index j = 0; j < input_dim; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (rng.bernoulli(spec.pi_u)) trips.emplace_back(i, j, rng.uniform(-spec.a_u, spec.a_u));
  mats.U.resize(n, input_dim);
  mats.U.setFromTriplets(trips.begin(), trips.end());

  mats.lambda_w = detail::spectral_radius(mats.W);
  return mats;
}

/// Leaky tanh update
///   h_t = phi * tanh((delta/|lambda_W|) W h_{t-1} + U x_t) + (1 - phi) h_{t-1}.
/// The activation is a replaceable function slot; tests use the identity.
inline ReservoirState update_state(const ReservoirState& state, const Eigen::VectorXd& x,
                                   const ReservoirMatrices& mats, const EsnSpec& spec,
                                   double (*activation)(double) = nullptr) {
  if (state.h.size() != mats.W.rows() || x.size() != mats.U.cols())
    throw schema_error("update_state: dimension mismatch");
  if (!x.allFinite() || !state.h.allFinite())
    throw invalid_data_error("update_state: non-finite input");
  ReservoirState next;
  Eigen::VectorXd z = mats.U * x;
  const double scale = mats.recurrence_scale(spec.delta);
  if (scale != 0.0) z += scale * (mats.W * state.h);
  if (activation == nullptr)
    z = z.array().tanh();
  else
    z = z.unaryExpr(activation);
  next.h = spec.phi * z + (1.0 - spec.phi) * state.h;
  next.t = state.t + 1;
  return next;
}

/// Iterates update_state over time-ordered inputs; h_0 defaults to zero.
inline std::vector<ReservoirState> run_reservoir(const std::vector<Eigen::VectorXd>& inputs,
                                                 const ReservoirMatrices& mats,
                                                 const EsnSpec& spec,
                                                 const ReservoirState* initial = nullptr,
                                                 double (*activation)(double) = nullptr) {
  ReservoirState state;
  if (initial != nullptr)
    state = *initial;
  else {
    state.h = Eigen::VectorXd::Zero(mats.W.rows());
    state.t = -1;
  }
  std::vector<ReservoirState> states;
  states.reserve(inputs.size());
  for (const auto& x : inputs) {
    state = update_state(state, x, mats, spec, activation);
    states.push_back(state);
  }
  return states;
}

/// Design matrix with rows (h_t', (h_t .* h_t)').
inline Eigen::MatrixXd build_design(const std::vector<ReservoirState>& states) {
  if (states.empty()) throw insufficient_data_error("build_design: no states");
  const Eigen::Index n_h = states.front().h.size();
  Eigen::MatrixXd H(static_cast<Eigen::Index>(states.size()), 2 * n_h);
  for (std::size_t r = 0; r < states.size(); ++r) {
    H.row(static_cast<Eigen::Index>(r)).head(n_h) = states[r].h.transpose();
    H.row(static_cast<Eigen::Index>(r)).tail(n_h) =
        states[r].h.array().square().matrix().transpose();
  }
  return H;
}

/// Ridge closed form B = (H'H + lambda I)^-1 H'Y through a symmetric
/// positive-definite solve; jitter is retried when the factorization
/// fails, up to ten escalations.
inline ReadoutMap ridge_fit(const Eigen::MatrixXd& H, const Eigen::MatrixXd& Y, double lambda) {
  if (H.rows() != Y.rows())
    throw schema_error("ridge_fit: H and Y row counts differ");
  if (lambda < 0.0) throw configuration_error("ridge_fit: lambda must be >= 0");

  const Eigen::Index p = H.cols();
  Eigen::MatrixXd gram = H.transpose() * H;
  gram.diagonal().array() += lambda;
  const Eigen::MatrixXd rhs = H.transpose() * Y;

  const double scale = std::max(gram.diagonal().maxCoeff(), 1e-30);
  double jitter = 0.0;
  for (int attempt = 0; attempt <= 10; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(
        jitter == 0.0 ? gram : Eigen::MatrixXd(gram + jitter * Eigen::MatrixXd::Identity(p, p)));
    if (llt.info() == Eigen::Success) {
      ReadoutMap out;
      out.B = llt.solve(rhs);
      return out;
    }
    if (lambda == 0.0)
      throw singular_design_error(
          "ridge_fit: H'H is singular at lambda = 0; use a positive ridge penalty");
    jitter = (jitter == 0.0) ? 1e-14 * scale : jitter * 10.0;
  }
  throw singular_design_error("ridge_fit: factorization failed despite jitter");
}

/// Quadratic readout y = V1 h + V2 (h .* h) = B' (h, h.*h).
inline Eigen::VectorXd readout(const ReservoirState& state, const ReadoutMap& map) {
  const Eigen::Index n_h = map.n_h();
  if (state.h.size() != n_h) throw schema_error("readout: state size does not match B");
  Eigen::VectorXd features(2 * n_h);
  features.head(n_h) = state.h;
  features.tail(n_h) = state.h.array().square();
  return map.B.transpose() * features;
}

}  // namespace sesn

#endif  // SESN_ESN_HPP
