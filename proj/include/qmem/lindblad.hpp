#pragma once

// Qudit system S coupled to a damped memory qubit M,
//
//   H_SM = omega (J_- (x) sigma_+ + J_+ (x) sigma_-),
//   d rho / dt = -i [H_SM, rho] + gamma D[1_S (x) sigma_-] rho,
//
// with D[X] rho = X rho X^dag - {X^dag X, rho} / 2. States live on
// S (x) M (x) R where R is an untouched spectator (the ancilla A when the
// channel acts on half of an entangled pair). The reduced system channel
// is E_t[rho_S] = Tr_M exp(L t)[rho_S (x) rho_M].

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstddef>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qmem/ode.hpp"
#include "qmem/qstate.hpp"

namespace qmem {

struct LindbladModel {
  std::size_t d = 4;
  double omega = 1.0;
  double gamma = 0.05;
  LadderConvention convention = LadderConvention::Spin;

  void validate() const {
    if (d < 2) throw Error(ErrorKind::InvalidDimension, "system dimension must be >= 2");
    if (d > 16) throw Error(ErrorKind::InvalidDimension, "system dimension above 16 is not supported");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw Error(ErrorKind::InvalidArgument, "omega must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw Error(ErrorKind::InvalidArgument, "gamma must be >= 0");
  }
};

/// Memory qubit ground state |0><0|.
inline DensityMatrix memory_ground_state() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  return DensityMatrix(std::move(m), Dims{2});
}

/// Dense H_SM on S (x) M (dimension 2d).
inline CMatrix system_memory_hamiltonian(const LindbladModel& model) {
  model.validate();
  const LadderPair j = ladder_operators(model.d, model.convention);
  const LadderPair sigma = ladder_operators(2, LadderConvention::TruncatedOscillator);
  return model.omega * (kron(j.minus, sigma.plus) + kron(j.plus, sigma.minus));
}

/// GKSL generator acting on operators over S (x) M (x) R, where R has
/// dimension `spectator_dim` and is left untouched.
class Generator {
 public:
  using Sparse = Eigen::SparseMatrix<cplx>;

  Generator(const LindbladModel& model, std::size_t spectator_dim) : model_(model), spectator_(spectator_dim) {
    model_.validate();
    if (spectator_ == 0) throw Error(ErrorKind::InvalidDimension, "spectator dimension must be positive");
    const auto k = static_cast<Eigen::Index>(spectator_);
    const auto d = static_cast<Eigen::Index>(model_.d);
    const CMatrix id_k = CMatrix::Identity(k, k);

    const CMatrix h = kron(system_memory_hamiltonian(model_), id_k);
    const LadderPair sigma = ladder_operators(2, LadderConvention::TruncatedOscillator);
    const CMatrix x = kron(kron(CMatrix::Identity(d, d), sigma.minus), id_k);
    const CMatrix h_eff = h - cplx(0.0, 0.5 * model_.gamma) * (x.adjoint() * x);

    h_ = h.sparseView();
    h_eff_ = h_eff.sparseView();
    h_eff_dag_ = CMatrix(h_eff.adjoint()).sparseView();
    jump_ = x.sparseView();
    jump_dag_ = CMatrix(x.adjoint()).sparseView();
  }

  const LindbladModel& model() const noexcept { return model_; }
  std::size_t dim() const noexcept { return 2 * model_.d * spectator_; }
  Dims dims() const { return spectator_ == 1 ? Dims{model_.d, 2} : Dims{model_.d, 2, spectator_}; }

  /// H_SM (x) 1_R
  const Sparse& hamiltonian() const noexcept { return h_; }
  /// 1_S (x) sigma_- (x) 1_R
  const Sparse& jump() const noexcept { return jump_; }

  /// L[rho] for an arbitrary (not necessarily Hermitian) operator.
  CMatrix operator()(const CMatrix& rho) const {
    const cplx minus_i(0.0, -1.0);
    CMatrix out = minus_i * (h_eff_ * rho);
    out.noalias() -= minus_i * (rho * h_eff_dag_);
    if (model_.gamma != 0.0) out.noalias() += model_.gamma * ((jump_ * rho) * jump_dag_);
    return out;
  }

 private:
  LindbladModel model_;
  std::size_t spectator_;
  Sparse h_, h_eff_, h_eff_dag_, jump_, jump_dag_;
};

inline Generator build_generator(const LindbladModel& model, std::size_t spectator_dim = 1) {
  return Generator(model, spectator_dim);
}

namespace detail {

inline std::size_t spectator_dimension(const LindbladModel& model, const Dims& dims) {
  if (dims.size() < 2 || dims[0] != model.d || dims[1] != 2)
    throw Error(ErrorKind::DimensionMismatch, "state dims must start with [d, 2] for d = " + std::to_string(model.d));
  std::size_t k = 1;
  for (std::size_t i = 2; i < dims.size(); ++i) k *= dims[i];
  return k;
}

/// Evolves a raw operator under the generator to every grid time.
inline std::vector<CMatrix> evolve_operator(const Generator& gen, const CMatrix& x0, std::span<const double> grid,
                                            const OdeOptions& options) {
  auto rhs = [&gen](double, const CMatrix& rho) { return gen(rho); };
  return integrate_on_grid<CMatrix>(rhs, x0, grid, options);
}

}  // namespace detail

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};

/// Integrates the master equation from rho0 (dims [d, 2, ...]) and samples
/// the state at every grid time. The grid must start at 0.
inline Trajectory evolve(const LindbladModel& model, const DensityMatrix& rho0, std::span<const double> t_grid,
                         const OdeOptions& options = {}) {
  model.validate();
  check_time_grid(t_grid);
  const Generator gen(model, detail::spectator_dimension(model, rho0.dims()));
  const std::vector<CMatrix> raw = detail::evolve_operator(gen, rho0.data(), t_grid, options);
  Trajectory traj;
  traj.times.assign(t_grid.begin(), t_grid.end());
  traj.states.reserve(raw.size());
  traj.states.push_back(rho0);
  for (std::size_t i = 1; i < raw.size(); ++i) traj.states.emplace_back(raw[i], rho0.dims());
  return traj;
}

/// |Phi+>_SA (x) rho_M ordered as S (x) M (x) A.
inline DensityMatrix choi_probe_state(std::size_t d, const DensityMatrix& memory = memory_ground_state()) {
  if (memory.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "memory state must be a qubit");
  const DensityMatrix phi = max_entangled_state(d);
  // reorder S (x) A (x) M into S (x) M (x) A
  const auto n = static_cast<Eigen::Index>(d);
  const CMatrix sam = kron(phi.data(), memory.data());
  auto flat = [n](Eigen::Index s, Eigen::Index m, Eigen::Index a) { return (s * 2 + m) * n + a; };
  CMatrix sma = CMatrix::Zero(2 * n * n, 2 * n * n);
  for (Eigen::Index s = 0; s < n; ++s)
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index m = 0; m < 2; ++m)
        for (Eigen::Index s2 = 0; s2 < n; ++s2)
          for (Eigen::Index a2 = 0; a2 < n; ++a2)
            for (Eigen::Index m2 = 0; m2 < 2; ++m2)
              sma(flat(s, m, a), flat(s2, m2, a2)) = sam((s * n + a) * 2 + m, (s2 * n + a2) * 2 + m2);
  return DensityMatrix(std::move(sma), Dims{d, 2, d});
}

struct ChoiSample {
  double t;
  DensityMatrix rho_sa;
};

/// (E_t (x) 1_A)[|Phi+><Phi+|] at every grid time, with the memory
/// initialized in `memory` (|0><0| unless overridden).
inline std::vector<ChoiSample> reduced_choi_trajectory(const LindbladModel& model, std::span<const double> t_grid,
                                                       const OdeOptions& options = {},
                                                       const DensityMatrix& memory = memory_ground_state()) {
  model.validate();
  check_time_grid(t_grid);
  const DensityMatrix rho0 = choi_probe_state(model.d, memory);
  const Generator gen(model, model.d);
  auto rhs = [&gen](double, const CMatrix& rho) { return gen(rho); };
  DormandPrince<CMatrix, decltype(rhs)> stepper(rhs, options);

  std::vector<ChoiSample> out;
  out.reserve(t_grid.size());
  double t = 0.0;
  CMatrix rho = rho0.data();
  const Dims sa{model.d, model.d};
  for (double target : t_grid) {
    stepper.advance(t, rho, target);
    out.push_back({target, DensityMatrix(partial_trace(rho, rho0.dims(), {0, 2}), sa)});
  }
  return out;
}

/// Reduced Choi state at arbitrary times, re-integrating from the closest
/// earlier cached full S (x) M (x) A state.
class ChoiFlow {
 public:
  explicit ChoiFlow(const LindbladModel& model, OdeOptions options = {},
                    const DensityMatrix& memory = memory_ground_state())
      : model_(model), gen_(model, model.d), options_(options), dims_(Dims{model.d, 2, model.d}) {
    cache_.emplace(0.0, choi_probe_state(model.d, memory).data());
  }

  const LindbladModel& model() const noexcept { return model_; }

  DensityMatrix at(double t) {
    if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "time must be >= 0");
    auto it = cache_.upper_bound(t);
    --it;
    const double start = it->first;
    CMatrix rho = it->second;
    if (t > start) {
      auto rhs = [this](double, const CMatrix& r) { return gen_(r); };
      DormandPrince<CMatrix, decltype(rhs)> stepper(rhs, options_);
      double tt = start;
      stepper.advance(tt, rho, t);
      remember(t, rho);
    }
    return DensityMatrix(partial_trace(rho, dims_, {0, 2}), Dims{model_.d, model_.d});
  }

 private:
  void remember(double t, const CMatrix& rho) {
    constexpr std::size_t kMaxCached = 64;
    if (cache_.size() >= kMaxCached) {
      // keep t = 0, drop the oldest-time entry after it
      cache_.erase(std::next(cache_.begin()));
    }
    cache_.emplace(t, rho);
  }

  LindbladModel model_;
  Generator gen_;
  OdeOptions options_;
  Dims dims_;
  std::map<double, CMatrix> cache_;
};

/// Matrix of E_t acting on column-major vectorized d x d operators:
/// vec(E_t[X]) = S vec(X).
inline CMatrix channel_superoperator(const LindbladModel& model, double t, const OdeOptions& options = {},
                                     const DensityMatrix& memory = memory_ground_state()) {
  model.validate();
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "time must be >= 0");
  const auto d = static_cast<Eigen::Index>(model.d);
  const Generator gen(model, 1);
  const Dims sm{model.d, 2};
  CMatrix super = CMatrix::Zero(d * d, d * d);
  const std::vector<double> grid = t > 0.0 ? std::vector<double>{0.0, t} : std::vector<double>{0.0};
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      CMatrix unit = CMatrix::Zero(d, d);
      unit(i, j) = 1.0;
      const CMatrix x0 = kron(unit, memory.data());
      const CMatrix xt = detail::evolve_operator(gen, x0, grid, options).back();
      const CMatrix reduced = partial_trace(xt, sm, {0});
      super.col(i + j * d) = Eigen::Map<const CVector>(reduced.data(), d * d);
    }
  }
  return super;
}

inline CMatrix apply_superoperator(const CMatrix& super, const CMatrix& x) {
  const Eigen::Index n = x.rows();
  if (super.cols() != n * n || x.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, "superoperator does not match operator size");
  const CVector v = super * Eigen::Map<const CVector>(x.data(), n * n);
  return Eigen::Map<const CMatrix>(v.data(), n, n);
}

/// Normalized Choi matrix (E (x) 1)[|Phi+><Phi+|] = sum_ij E(|i><j|) (x) |i><j| / d.
inline CMatrix choi_matrix(const CMatrix& super) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(super.rows()))));
  if (d * d != super.rows() || super.rows() != super.cols())
    throw Error(ErrorKind::DimensionMismatch, "superoperator must be d^2 x d^2");
  CMatrix choi = CMatrix::Zero(d * d, d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const CMatrix image = Eigen::Map<const CMatrix>(super.col(i + j * d).data(), d, d);
      CMatrix unit = CMatrix::Zero(d, d);
      unit(i, j) = 1.0;
      choi += kron(image, unit);
    }
  }
  return choi / static_cast<double>(d);
}

}  // namespace qmem
