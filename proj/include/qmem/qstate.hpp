#pragma once

// Finite-dimensional state algebra: density matrices over tensor-product
// spaces, partial traces and von Neumann entropies. All entropies are in
// nats (natural logarithm).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qmem/error.hpp"

namespace qmem {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Dims = std::vector<std::size_t>;

namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double trace = 1e-9;
inline constexpr double negative_eigenvalue = 1e-9;
inline constexpr double zero_eigenvalue = 1e-12;
}  // namespace tol

inline std::size_t product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

/// max_ij |A_ij - conj(A_ji)|
inline double hermiticity_defect(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Hermitian, unit-trace operator on a tensor product of subsystems.
///
/// Construction checks the shape, Hermiticity (1e-10) and trace (1e-9).
/// Positivity needs an eigendecomposition and is checked on demand by
/// `validate()` and implicitly by `von_neumann_entropy`.
class DensityMatrix {
 public:
  DensityMatrix(CMatrix data, Dims dims) : data_(std::move(data)), dims_(std::move(dims)) {
    if (dims_.empty() || std::find(dims_.begin(), dims_.end(), std::size_t{0}) != dims_.end())
      throw Error(ErrorKind::InvalidDimension, "subsystem dimensions must be positive");
    const auto n = static_cast<Eigen::Index>(product(dims_));
    if (data_.rows() != n || data_.cols() != n)
      throw Error(ErrorKind::InvalidDimension, "matrix side " + std::to_string(data_.rows()) +
                                                   " does not match subsystem dimensions");
    const double defect = hermiticity_defect(data_);
    if (defect > tol::hermitian)
      throw Error(ErrorKind::InvalidState, "matrix is not Hermitian (defect " + std::to_string(defect) + ")");
    const double tr = data_.trace().real();
    if (std::abs(tr - 1.0) > tol::trace)
      throw Error(ErrorKind::InvalidState, "trace is " + std::to_string(tr));
  }

  /// Single-system state with dims {n}.
  explicit DensityMatrix(CMatrix data) : DensityMatrix(data, Dims{static_cast<std::size_t>(data.rows())}) {}

  const CMatrix& data() const noexcept { return data_; }
  const Dims& dims() const noexcept { return dims_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  std::size_t subsystems() const noexcept { return dims_.size(); }

  cplx operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }

  double trace() const { return data_.trace().real(); }
  double purity() const { return (data_ * data_).trace().real(); }

  /// Eigenvalues in ascending order after symmetrization.
  Eigen::VectorXd spectrum() const {
    const CMatrix herm = 0.5 * (data_ + data_.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
  }

  double min_eigenvalue() const { return spectrum()(0); }

  /// Throws if the smallest eigenvalue is below -1e-9.
  void validate() const {
    const double lo = min_eigenvalue();
    if (lo < -tol::negative_eigenvalue)
      throw Error(ErrorKind::InvalidState, "negative eigenvalue " + std::to_string(lo));
  }

 private:
  CMatrix data_;
  Dims dims_;
};

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityMatrix(kron(a.data(), b.data()), std::move(dims));
}

inline DensityMatrix pure_state(const CVector& psi, Dims dims) {
  const double norm = psi.norm();
  if (norm == 0.0) throw Error(ErrorKind::InvalidState, "zero state vector");
  const CVector v = psi / norm;
  return DensityMatrix(v * v.adjoint(), std::move(dims));
}

inline DensityMatrix maximally_mixed(std::size_t d) {
  if (d == 0) throw Error(ErrorKind::InvalidDimension, "dimension must be positive");
  const auto n = static_cast<Eigen::Index>(d);
  return DensityMatrix(CMatrix::Identity(n, n) / static_cast<double>(d), Dims{d});
}

/// |Phi+><Phi+| with |Phi+> = sum_l |l l> / sqrt(d), dims {d, d}.
inline DensityMatrix max_entangled_state(std::size_t d) {
  if (d < 2) throw Error(ErrorKind::InvalidDimension, "maximally entangled state needs d >= 2");
  const auto n = static_cast<Eigen::Index>(d);
  CVector psi = CVector::Zero(n * n);
  for (Eigen::Index l = 0; l < n; ++l) psi(l * n + l) = 1.0;
  psi /= std::sqrt(static_cast<double>(d));
  return DensityMatrix(psi * psi.adjoint(), Dims{d, d});
}

namespace detail {

// Splits every basis index of the full space into (index in the kept
// subsystems, index in the traced subsystems), both row-major.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(const Dims& dims,
                                                                                   const std::vector<bool>& kept) {
  const std::size_t total = product(dims);
  std::vector<std::size_t> keep_idx(total), trace_idx(total);
  std::vector<std::size_t> digits(dims.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t k = 0, t = 0;
    for (std::size_t s = 0; s < dims.size(); ++s) {
      if (kept[s])
        k = k * dims[s] + digits[s];
      else
        t = t * dims[s] + digits[s];
    }
    keep_idx[flat] = k;
    trace_idx[flat] = t;
    for (std::size_t s = dims.size(); s-- > 0;) {
      if (++digits[s] < dims[s]) break;
      digits[s] = 0;
    }
  }
  return {std::move(keep_idx), std::move(trace_idx)};
}

}  // namespace detail

/// Partial trace of an arbitrary (not necessarily Hermitian) operator over
/// all subsystems not listed in `keep`. Kept subsystems stay in their
/// original order regardless of the order in `keep`.
inline CMatrix partial_trace(const CMatrix& op, const Dims& dims, const std::vector<std::size_t>& keep) {
  if (keep.empty()) throw Error(ErrorKind::InvalidSubsystem, "keep set is empty");
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t k : keep) {
    if (k >= dims.size())
      throw Error(ErrorKind::InvalidSubsystem, "subsystem index " + std::to_string(k) + " out of range");
    if (kept[k]) throw Error(ErrorKind::InvalidSubsystem, "subsystem index " + std::to_string(k) + " repeated");
    kept[k] = true;
  }
  if (static_cast<std::size_t>(op.rows()) != product(dims) || op.rows() != op.cols())
    throw Error(ErrorKind::InvalidDimension, "operator does not match subsystem dimensions");

  std::size_t out_dim = 1;
  for (std::size_t s = 0; s < dims.size(); ++s)
    if (kept[s]) out_dim *= dims[s];

  const auto [keep_idx, trace_idx] = detail::split_indices(dims, kept);
  const auto n = static_cast<Eigen::Index>(out_dim);
  CMatrix out = CMatrix::Zero(n, n);
  const auto total = static_cast<Eigen::Index>(keep_idx.size());
  for (Eigen::Index j = 0; j < total; ++j)
    for (Eigen::Index i = 0; i < total; ++i)
      if (trace_idx[i] == trace_idx[j]) out(keep_idx[i], keep_idx[j]) += op(i, j);
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& keep) {
  CMatrix reduced = partial_trace(rho.data(), rho.dims(), keep);
  std::vector<std::size_t> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  Dims dims;
  for (std::size_t k : sorted) dims.push_back(rho.dims()[k]);
  return DensityMatrix(std::move(reduced), std::move(dims));
}

/// -sum lambda ln lambda of a Hermitian PSD matrix. Eigenvalues in
/// [-1e-9, 1e-12) count as zero; anything more negative is rejected.
inline double entropy_of_hermitian(const CMatrix& a) {
  const double defect = hermiticity_defect(a);
  if (defect > tol::hermitian)
    throw Error(ErrorKind::InvalidState, "entropy of non-Hermitian matrix (defect " + std::to_string(defect) + ")");
  const CMatrix herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();
  if (ev.size() > 0 && ev(0) < -tol::negative_eigenvalue)
    throw Error(ErrorKind::InvalidState, "negative eigenvalue " + std::to_string(ev(0)));
  double s = 0.0;
  for (double lambda : ev)
    if (lambda >= tol::zero_eigenvalue) s -= lambda * std::log(lambda);
  return s;
}

inline double von_neumann_entropy(const DensityMatrix& rho) { return entropy_of_hermitian(rho.data()); }

/// Entropies of a bipartite system-ancilla state.
struct EntropyTriple {
  double s_system = 0.0;
  double s_ancilla = 0.0;
  double s_joint = 0.0;

  /// S_{S|A} = S(SA) - S(A)
  double cond_system_given_ancilla() const { return s_joint - s_ancilla; }
  /// S_{A|S} = S(SA) - S(S)
  double cond_ancilla_given_system() const { return s_joint - s_system; }
  double mutual_information() const { return s_system + s_ancilla - s_joint; }
};

inline EntropyTriple entropy_triple(const DensityMatrix& rho_sa) {
  if (rho_sa.subsystems() != 2)
    throw Error(ErrorKind::InvalidSubsystem,
                "entropy triple needs a bipartite state, got " + std::to_string(rho_sa.subsystems()) + " subsystems");
  EntropyTriple e;
  e.s_system = entropy_of_hermitian(partial_trace(rho_sa.data(), rho_sa.dims(), {0}));
  e.s_ancilla = entropy_of_hermitian(partial_trace(rho_sa.data(), rho_sa.dims(), {1}));
  e.s_joint = entropy_of_hermitian(rho_sa.data());
  return e;
}

enum class LadderConvention {
  /// J+|k> = sqrt(k+1)|k+1>, the oscillator raising operator cut at level d-1.
  TruncatedOscillator,
  /// Spin j = (d-1)/2 with |k> = |m = -j + k>.
  Spin,
};

inline std::string to_string(LadderConvention c) {
  return c == LadderConvention::Spin ? "spin" : "truncated-oscillator";
}

struct LadderPair {
  CMatrix plus;
  CMatrix minus;
};

/// d-dimensional raising/lowering operators. Both conventions give
/// sigma_+ = |1><0| for d = 2.
inline LadderPair ladder_operators(std::size_t d, LadderConvention convention) {
  if (d < 2) throw Error(ErrorKind::InvalidDimension, "ladder operators need d >= 2");
  const auto n = static_cast<Eigen::Index>(d);
  CMatrix plus = CMatrix::Zero(n, n);
  const double j = 0.5 * static_cast<double>(d - 1);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    double amp = 0.0;
    if (convention == LadderConvention::TruncatedOscillator) {
      amp = std::sqrt(static_cast<double>(k + 1));
    } else {
      const double m = -j + static_cast<double>(k);
      amp = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
    plus(k + 1, k) = amp;
  }
  CMatrix minus = plus.adjoint();
  return {std::move(plus), std::move(minus)};
}

}  // namespace qmem
