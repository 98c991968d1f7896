#pragma once

// Gaussian continuous-variable states and channels in quadrature units with
// hbar = 1 (vacuum covariance I/2). Quadratures are ordered
// (q_1, p_1, ..., q_N, p_N) and all states have zero mean.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qmem/error.hpp"

namespace qmem {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

namespace gauss_tol {
inline constexpr double symmetric = 1e-12;
inline constexpr double physical = 1e-9;
}  // namespace gauss_tol

/// Block-diagonal symplectic form, one [[0, 1], [-1, 0]] block per mode.
inline Eigen::MatrixXd symplectic_form(std::size_t modes) {
  const auto n = static_cast<Eigen::Index>(2 * modes);
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  return omega;
}

/// Smallest eigenvalue of the Hermitian matrix sigma + i Omega / 2.
inline double uncertainty_margin(const Eigen::MatrixXd& sigma) {
  const auto modes = static_cast<std::size_t>(sigma.rows() / 2);
  const Eigen::MatrixXcd m =
      sigma.cast<std::complex<double>>() + std::complex<double>(0.0, 0.5) * symplectic_form(modes).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

/// Covariance matrix of an N-mode zero-mean Gaussian state.
class CovarianceState {
 public:
  explicit CovarianceState(Eigen::MatrixXd sigma) : sigma_(std::move(sigma)) {
    if (sigma_.rows() != sigma_.cols() || sigma_.rows() == 0 || sigma_.rows() % 2 != 0)
      throw Error(ErrorKind::InvalidDimension, "covariance matrix must be 2N x 2N");
    if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > gauss_tol::symmetric)
      throw Error(ErrorKind::UnphysicalState, "covariance matrix is not symmetric");
    const double margin = uncertainty_margin(sigma_);
    if (margin < -gauss_tol::physical)
      throw Error(ErrorKind::UnphysicalState,
                  "covariance violates the uncertainty relation (margin " + std::to_string(margin) + ")");
  }

  const Eigen::MatrixXd& sigma() const noexcept { return sigma_; }
  std::size_t modes() const noexcept { return static_cast<std::size_t>(sigma_.rows() / 2); }

 private:
  Eigen::MatrixXd sigma_;
};

/// sigma -> M^T sigma M + N on a single mode.
struct GaussianChannel {
  Mat2 m = Mat2::Identity();
  Mat2 n = Mat2::Zero();

  static GaussianChannel identity() { return {}; }

  /// Channel applying `first` and then `this`.
  GaussianChannel after(const GaussianChannel& first) const {
    return {first.m * m, m.transpose() * first.n * m + n};
  }
};

/// Smallest eigenvalue of N + (i/2) Omega - (i/2) M^T Omega M.
inline double cp_margin(const GaussianChannel& ch) {
  const Mat2 omega = symplectic_form(1);
  const Eigen::Matrix2cd test = ch.n.cast<std::complex<double>>() +
                                std::complex<double>(0.0, 0.5) * (omega - ch.m.transpose() * omega * ch.m).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(test, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

inline bool cp_check(const GaussianChannel& ch) {
  if ((ch.n - ch.n.transpose()).cwiseAbs().maxCoeff() > gauss_tol::symmetric) return false;
  return cp_margin(ch) >= -gauss_tol::physical;
}

/// System (alpha), ancilla (beta) and correlation (gamma) blocks of a
/// two-mode covariance matrix [[alpha, gamma], [gamma^T, beta]].
struct TwoModeBlocks {
  Mat2 alpha = 0.5 * Mat2::Identity();
  Mat2 beta = 0.5 * Mat2::Identity();
  Mat2 gamma = Mat2::Zero();

  Mat4 assembled() const {
    Mat4 s;
    s << alpha, gamma, gamma.transpose(), beta;
    return s;
  }

  static TwoModeBlocks from_matrix(const Mat4& s) {
    return {s.topLeftCorner<2, 2>(), s.bottomRightCorner<2, 2>(), s.topRightCorner<2, 2>()};
  }

  bool is_physical() const {
    const Mat4 s = assembled();
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > gauss_tol::symmetric) return false;
    return uncertainty_margin(s) >= -gauss_tol::physical;
  }

  CovarianceState state() const { return CovarianceState(assembled()); }
};

/// Acts with `ch` on the system mode of `state`.
inline TwoModeBlocks apply_channel(const TwoModeBlocks& state, const GaussianChannel& ch) {
  if (!cp_check(ch)) throw Error(ErrorKind::InvalidChannel, "channel is not completely positive");
  return {ch.m.transpose() * state.alpha * ch.m + ch.n, state.beta, ch.m.transpose() * state.gamma};
}

namespace detail {

/// h(1/2 + excess); accurate for small excess.
inline double h_from_excess(double excess) {
  if (excess <= 0.0) return 0.0;
  return (1.0 + excess) * std::log1p(excess) - excess * std::log(excess);
}

}  // namespace detail

/// Entropy (nats) of a single mode with symplectic eigenvalue x:
/// h(x) = (x + 1/2) ln(x + 1/2) - (x - 1/2) ln(x - 1/2).
inline double h(double x) {
  if (std::isnan(x)) throw Error(ErrorKind::Domain, "h(x) of NaN");
  if (x < 0.5 - gauss_tol::physical)
    throw Error(ErrorKind::Domain, "h(x) requires x >= 1/2, got " + std::to_string(x));
  return detail::h_from_excess(x - 0.5);
}

inline double entropy_single_mode(const Mat2& alpha) {
  const double det = alpha.determinant();
  if (det < 0.25 - gauss_tol::physical)
    throw Error(ErrorKind::UnphysicalState, "single-mode determinant below 1/4: " + std::to_string(det));
  return h(std::sqrt(std::max(det, 0.25)));
}

/// Symplectic eigenvalues (n_-, n_+) of a two-mode covariance matrix from
/// its local invariants.
inline std::pair<double, double> two_mode_symplectic_eigenvalues(const TwoModeBlocks& state) {
  const Mat4 s = state.assembled();
  const double delta = state.alpha.determinant() + state.beta.determinant() + 2.0 * state.gamma.determinant();
  const double det = s.determinant();
  double disc = delta * delta - 4.0 * det;

  // Rounding in det(sigma) scales with the fourth power of the entries, so
  // discriminants at that level are indistinguishable from a degenerate
  // spectrum (pure states sit exactly there).
  const double scale = s.cwiseAbs().maxCoeff();
  const double noise = 256.0 * std::numeric_limits<double>::epsilon() * (delta * delta + 16.0 * std::pow(scale, 4));
  if (disc < -gauss_tol::physical - noise)
    throw Error(ErrorKind::NumericalDegeneracy, "negative symplectic discriminant " + std::to_string(disc));
  if (disc < noise) disc = 0.0;

  const double plus_sq = 0.5 * (delta + std::sqrt(disc));
  if (!(plus_sq > 0.0)) throw Error(ErrorKind::UnphysicalState, "non-positive symplectic invariant");
  // n_-^2 n_+^2 = det(sigma); avoids cancellation in (delta - sqrt(disc)) / 2
  const double minus_sq = disc == 0.0 ? plus_sq : std::max(det, 0.0) / plus_sq;
  return {std::sqrt(minus_sq), std::sqrt(plus_sq)};
}

inline double entropy_two_mode(const TwoModeBlocks& state) {
  auto [n_minus, n_plus] = two_mode_symplectic_eigenvalues(state);
  if (n_minus < 0.5 - gauss_tol::physical)
    throw Error(ErrorKind::UnphysicalState, "symplectic eigenvalue below 1/2: " + std::to_string(n_minus));
  return h(std::max(n_minus, 0.5)) + h(std::max(n_plus, 0.5));
}

/// Two-mode squeezed vacuum: alpha = beta = cosh(r) I / 2,
/// gamma = sinh(r) sigma_z / 2.
inline TwoModeBlocks two_mode_squeezed(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::Domain, "squeezing must be positive");
  const double c = 0.5 * std::cosh(r);
  const double s = 0.5 * std::sinh(r);
  TwoModeBlocks blocks;
  blocks.alpha = c * Mat2::Identity();
  blocks.beta = c * Mat2::Identity();
  blocks.gamma << s, 0.0, 0.0, -s;
  return blocks;
}

/// Pure-loss channel M = sqrt(1 - eta) I, N = eta I / 2.
inline GaussianChannel lossy_channel(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorKind::Domain, "loss must lie in [0, 1]");
  return {std::sqrt(1.0 - eta) * Mat2::Identity(), 0.5 * eta * Mat2::Identity()};
}

/// Entropies entering the Gaussian witness for a two-snapshot dynamics.
struct GaussianEntropies {
  double s_system_t1 = 0.0;  ///< S[alpha_t1]
  double s_system_t2 = 0.0;  ///< S[alpha_t2]
  double s_ancilla_t2 = 0.0; ///< S[beta_t2]
  double s_joint_t2 = 0.0;   ///< S[sigma_t2]

  double delta_s() const { return s_system_t1 + s_joint_t2 - std::max(s_system_t2, s_ancilla_t2); }
};

inline GaussianEntropies gaussian_entropies(const TwoModeBlocks& state_t1, const TwoModeBlocks& state_t2) {
  GaussianEntropies e;
  e.s_system_t1 = entropy_single_mode(state_t1.alpha);
  e.s_system_t2 = entropy_single_mode(state_t2.alpha);
  e.s_ancilla_t2 = entropy_single_mode(state_t2.beta);
  e.s_joint_t2 = entropy_two_mode(state_t2);
  return e;
}

/// S[alpha_t1] + S[sigma_t2] - max{S[alpha_t2], S[beta_t2]}. Negative values
/// rule out any realization of the dynamics with classical memory.
inline double delta_S_gaussian(const TwoModeBlocks& state_t1, const TwoModeBlocks& state_t2) {
  return gaussian_entropies(state_t1, state_t2).delta_s();
}

/// Closed form of the witness for a two-mode squeezed probe sent through
/// lossy channels eta1 (first snapshot) and eta2 (second snapshot).
inline double delta_S_lossy(double eta1, double eta2, double r) {
  if (!(eta1 >= 0.0 && eta1 <= 1.0) || !(eta2 >= 0.0 && eta2 <= 1.0))
    throw Error(ErrorKind::Domain, "loss must lie in [0, 1]");
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::Domain, "squeezing must be positive");
  // (cosh r - 1) / 2 = sinh^2(r / 2), written as an excess over 1/2
  const double sh = std::sinh(0.5 * r);
  const double excess = sh * sh;
  return detail::h_from_excess((1.0 - eta1) * excess) + detail::h_from_excess(eta2 * excess) -
         detail::h_from_excess(excess);
}

struct SqueezingOptimum {
  double r_star = 0.0;
  double delta_s = 0.0;
};

struct SqueezingSearch {
  double r_min = 1e-3;
  double r_max = 6.0;
  std::size_t coarse_points = 40;
  /// Bracket width in ln r at which the golden-section search stops.
  double log_tolerance = 1e-9;
};

/// Minimizes delta_S_lossy over r in [r_min, r_max]: coarse scan in ln r,
/// then golden-section refinement around the best coarse point.
inline SqueezingOptimum minimize_delta_S_over_r(double eta1, double eta2, const SqueezingSearch& search = {}) {
  if (!(search.r_min > 0.0) || !(search.r_max > search.r_min) || search.coarse_points < 3)
    throw Error(ErrorKind::InvalidArgument, "invalid squeezing search range");
  const double lo = std::log(search.r_min);
  const double hi = std::log(search.r_max);
  auto f = [&](double log_r) { return delta_S_lossy(eta1, eta2, std::exp(log_r)); };

  const std::size_t n = search.coarse_points;
  std::vector<double> xs(n), fs(n);
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    fs[i] = f(xs[i]);
    if (fs[i] < fs[best]) best = i;
  }

  double a = xs[best == 0 ? 0 : best - 1];
  double b = xs[best + 1 == n ? n - 1 : best + 1];
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > search.log_tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }

  SqueezingOptimum opt{std::exp(xs[best]), fs[best]};
  for (double x : {a, b, c, d}) {
    const double v = f(x);
    if (v < opt.delta_s) opt = {std::exp(x), v};
  }
  return opt;
}

}  // namespace qmem
