#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace qmem;

namespace {

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

// Dense GKSL right-hand side written out term by term.
CMatrix dense_gksl(const CMatrix& h, const CMatrix& x, double gamma, const CMatrix& rho) {
  const cplx i(0.0, 1.0);
  const CMatrix xdx = x.adjoint() * x;
  return -i * (h * rho - rho * h) + gamma * (x * rho * x.adjoint() - 0.5 * (xdx * rho + rho * xdx));
}

}  // namespace

TEST(Generator, MatchesDenseCommutatorForm) {
  std::mt19937_64 rng(23);
  for (std::size_t d : {2u, 3u, 4u}) {
    const LindbladModel model{d, 1.3, 0.05, LadderConvention::Spin};
    const auto n = static_cast<Eigen::Index>(d);
    // H = omega (J- (x) sigma+ + J+ (x) sigma-) from explicit matrix elements
    CMatrix jp = CMatrix::Zero(n, n);
    const double j = 0.5 * static_cast<double>(d - 1);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      const double m = -j + static_cast<double>(k);
      jp(k + 1, k) = std::sqrt((j - m) * (j + m + 1.0));
    }
    CMatrix sp = CMatrix::Zero(2, 2);
    sp(1, 0) = 1.0;
    const CMatrix h = model.omega * (kron(jp.adjoint(), sp) + kron(jp, sp.adjoint()));
    const CMatrix x = kron(CMatrix::Identity(n, n), sp.adjoint());

    const Generator gen = build_generator(model);
    EXPECT_LT((CMatrix(gen.hamiltonian()) - h).norm(), 1e-14);
    const DensityMatrix rho = testkit::random_state({d, 2}, rng);
    EXPECT_LT((gen(rho.data()) - dense_gksl(h, x, model.gamma, rho.data())).norm(), 1e-13);
  }
}

TEST(Generator, SpectatorIsUntouched) {
  std::mt19937_64 rng(29);
  const LindbladModel model{3, 1.0, 0.2, LadderConvention::Spin};
  const Generator small = build_generator(model, 1);
  const Generator big = build_generator(model, 3);
  const DensityMatrix a = testkit::random_state({3, 2}, rng);
  const DensityMatrix r = testkit::random_state({3}, rng);
  const CMatrix lhs = big(kron(a.data(), r.data()));
  EXPECT_LT((lhs - kron(small(a.data()), r.data())).norm(), 1e-13);
}

TEST(Generator, GroundStateIsStationary) {
  for (std::size_t d : {2u, 4u}) {
    const auto n = static_cast<Eigen::Index>(2 * d);
    CMatrix g = CMatrix::Zero(n, n);
    g(0, 0) = 1.0;
    const Generator gen = build_generator({d, 1.0, 0.3, LadderConvention::Spin});
    EXPECT_LT(gen(g).norm(), 1e-15);
  }
}

TEST(Generator, TracelessOutput) {
  std::mt19937_64 rng(31);
  const Generator gen = build_generator({4, 1.0, 0.4, LadderConvention::TruncatedOscillator});
  const DensityMatrix rho = testkit::random_state({4, 2}, rng);
  EXPECT_LT(std::abs(gen(rho.data()).trace()), 1e-13);
}

TEST(Model, Validation) {
  EXPECT_THROW((LindbladModel{1, 1.0, 0.0}).validate(), Error);
  EXPECT_THROW((LindbladModel{17, 1.0, 0.0}).validate(), Error);
  EXPECT_THROW((LindbladModel{3, 0.0, 0.0}).validate(), Error);
  EXPECT_THROW((LindbladModel{3, 1.0, -0.1}).validate(), Error);
  EXPECT_NO_THROW((LindbladModel{3, 1.0, 0.0}).validate());
}

TEST(Evolution, QubitSingleExcitationClosedForm) {
  // d = 2, gamma = 0: the Choi probe stays in a two-level sector and
  // S_S = H(cos^2(wt)/2), -S_{S|A} = ln 2 - H(sin^2(wt)/2).
  const LindbladModel model{2, 1.0, 0.0, LadderConvention::Spin};
  const std::vector<double> grid = uniform_grid(6.0, 61);
  for (const ChoiSample& s : reduced_choi_trajectory(model, grid)) {
    const EntropyTriple e = entropy_triple(s.rho_sa);
    const double c2 = std::pow(std::cos(s.t), 2), s2 = std::pow(std::sin(s.t), 2);
    EXPECT_NEAR(e.s_system, binary_entropy(0.5 * c2), 1e-8) << "t = " << s.t;
    EXPECT_NEAR(-e.cond_system_given_ancilla(), std::log(2.0) - binary_entropy(0.5 * s2), 1e-8) << "t = " << s.t;
    EXPECT_NEAR(e.s_ancilla, std::log(2.0), 1e-12);
  }
}

TEST(Evolution, ExcitedPopulationClosedForm) {
  // |1>_S |0>_M oscillates to |0>_S |1>_M: population cos^2(wt) for gamma = 0
  const LindbladModel model{2, 0.7, 0.0, LadderConvention::Spin};
  CMatrix rho = CMatrix::Zero(4, 4);
  rho(2, 2) = 1.0;
  const std::vector<double> grid = uniform_grid(5.0, 26);
  const Trajectory traj = evolve(model, DensityMatrix(rho, {2, 2}), grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(traj.states[i](2, 2).real(), std::pow(std::cos(0.7 * grid[i]), 2), 1e-8);
}

TEST(Evolution, TraceAndPositivity) {
  std::mt19937_64 rng(37);
  const LindbladModel model{3, 1.0, 0.5, LadderConvention::Spin};
  const DensityMatrix rho0 = testkit::random_state({3, 2}, rng);
  const Trajectory traj = evolve(model, rho0, uniform_grid(20.0, 41));
  for (const DensityMatrix& rho : traj.states) {
    EXPECT_NEAR(rho.trace(), 1.0, 1e-9);
    EXPECT_GT(rho.min_eigenvalue(), -1e-9);
  }
}

TEST(Evolution, DimsMismatchRejected) {
  const LindbladModel model{3, 1.0, 0.5, LadderConvention::Spin};
  EXPECT_THROW(evolve(model, maximally_mixed(6), uniform_grid(1.0, 3)), Error);
}

TEST(Channel, SuperoperatorMatchesStateEvolution) {
  std::mt19937_64 rng(41);
  const LindbladModel model{3, 1.0, 0.1, LadderConvention::Spin};
  const double t = 1.7;
  const CMatrix super = channel_superoperator(model, t);
  const DensityMatrix rho_s = testkit::random_state({3}, rng);
  const Trajectory traj = evolve(model, tensor(rho_s, memory_ground_state()), std::vector<double>{0.0, t});
  const CMatrix direct = partial_trace(traj.states.back(), {0}).data();
  EXPECT_LT((apply_superoperator(super, rho_s.data()) - direct).norm(), 1e-9);
}

TEST(Channel, ChoiMatchesProbeTrajectory) {
  const LindbladModel model{3, 1.0, 0.1, LadderConvention::Spin};
  const double t = 2.3;
  const CMatrix choi = choi_matrix(channel_superoperator(model, t));
  const std::vector<ChoiSample> probe = reduced_choi_trajectory(model, std::vector<double>{0.0, t});
  EXPECT_LT((choi - probe.back().rho_sa.data()).norm(), 1e-9);
  EXPECT_GT(DensityMatrix(0.5 * (choi + choi.adjoint()), {3, 3}).min_eigenvalue(), -1e-9);
}

TEST(Channel, FlowMatchesGridTrajectory) {
  const LindbladModel model{4, 1.0, 0.05, LadderConvention::Spin};
  const std::vector<double> grid = uniform_grid(3.0, 7);
  const std::vector<ChoiSample> traj = reduced_choi_trajectory(model, grid);
  ChoiFlow flow(model);
  for (std::size_t i : {5u, 2u, 6u}) EXPECT_LT((flow.at(grid[i]).data() - traj[i].rho_sa.data()).norm(), 1e-9);
}

TEST(Channel, IdentityAtTimeZero) {
  const LindbladModel model{3, 1.0, 0.1, LadderConvention::Spin};
  EXPECT_LT((channel_superoperator(model, 0.0) - CMatrix::Identity(9, 9)).norm(), 1e-15);
}

TEST(Witness, QuditGridRefinementConvergence) {
  const LindbladModel model{3, 1.0, 0.05, LadderConvention::Spin};
  QuditOptions coarse;
  QuditOptions fine;
  fine.points = 2 * coarse.points - 1;
  const double a = analyze_qudit(model, coarse).report.delta_s;
  const double b = analyze_qudit(model, fine).report.delta_s;
  EXPECT_NEAR(a, b, 1e-6);
}
