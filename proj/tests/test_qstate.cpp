#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace qmem;

namespace {

// Partial trace by explicit index arithmetic over a tripartite space.
CMatrix naive_trace_middle(const CMatrix& rho, std::size_t a, std::size_t b, std::size_t c) {
  const auto ac = static_cast<Eigen::Index>(a * c);
  CMatrix out = CMatrix::Zero(ac, ac);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t k = 0; k < c; ++k)
      for (std::size_t i2 = 0; i2 < a; ++i2)
        for (std::size_t k2 = 0; k2 < c; ++k2)
          for (std::size_t j = 0; j < b; ++j)
            out(static_cast<Eigen::Index>(i * c + k), static_cast<Eigen::Index>(i2 * c + k2)) +=
                rho(static_cast<Eigen::Index>((i * b + j) * c + k), static_cast<Eigen::Index>((i2 * b + j) * c + k2));
  return out;
}

}  // namespace

TEST(Entropy, FrozenQubitValue) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 0.25;
  m(1, 1) = 0.75;
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(m)), 0.5623351446188083502880, 1e-14);
}

TEST(Entropy, MaximallyMixedAndPure) {
  std::mt19937_64 rng(7);
  for (std::size_t d = 2; d <= 8; ++d) {
    EXPECT_NEAR(von_neumann_entropy(maximally_mixed(d)), std::log(static_cast<double>(d)), 1e-12);
    const CVector psi = testkit::ginibre(static_cast<Eigen::Index>(d), 1, rng);
    EXPECT_LE(std::abs(von_neumann_entropy(pure_state(psi, {d}))), 1e-10);
  }
}

TEST(Entropy, UnitaryInvariance) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho = testkit::random_state({5}, rng);
    const CMatrix u = testkit::random_unitary(5, rng);
    const CMatrix rotated = u * rho.data() * u.adjoint();
    EXPECT_NEAR(von_neumann_entropy(rho), von_neumann_entropy(DensityMatrix(0.5 * (rotated + rotated.adjoint()))),
                1e-11);
  }
}

TEST(Entropy, RejectsNegativeSpectrum) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.1;
  m(1, 1) = -0.1;
  try {
    von_neumann_entropy(DensityMatrix(m));
    FAIL() << "expected an exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidState);
  }
}

TEST(Entropy, ClampsTinyNegativeEigenvalues) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.0 + 1e-11;
  m(1, 1) = -1e-11;
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(m)), 0.0, 1e-9);
}

TEST(DensityMatrix, ConstructionChecks) {
  EXPECT_THROW(DensityMatrix(CMatrix::Identity(3, 3), Dims{2, 2}), Error);
  EXPECT_THROW(DensityMatrix(CMatrix::Identity(2, 2), Dims{2}), Error);
  CMatrix nonherm = CMatrix::Identity(2, 2) / 2.0;
  nonherm(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix(nonherm, Dims{2}), Error);
  EXPECT_THROW(max_entangled_state(1), Error);
}

TEST(PartialTrace, MatchesIndexLoop) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix rho = testkit::random_state({2, 3, 2}, rng);
    const CMatrix ours = partial_trace(rho.data(), rho.dims(), {0, 2});
    EXPECT_LT((ours - naive_trace_middle(rho.data(), 2, 3, 2)).norm(), 1e-13);
    // keep order does not matter
    EXPECT_LT((partial_trace(rho.data(), rho.dims(), {2, 0}) - ours).norm(), 1e-15);
  }
}

TEST(PartialTrace, ProductStates) {
  std::mt19937_64 rng(5);
  const DensityMatrix a = testkit::random_state({3}, rng);
  const DensityMatrix b = testkit::random_state({4}, rng);
  const DensityMatrix ab = tensor(a, b);
  EXPECT_LT((partial_trace(ab, {0}).data() - a.data()).norm(), 1e-14);
  EXPECT_LT((partial_trace(ab, {1}).data() - b.data()).norm(), 1e-14);
}

TEST(PartialTrace, RejectsBadKeepSets) {
  const DensityMatrix rho = max_entangled_state(2);
  for (const std::vector<std::size_t>& keep : {std::vector<std::size_t>{}, {2}, {0, 0}}) {
    try {
      partial_trace(rho, keep);
      FAIL() << "expected an exception";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidSubsystem);
    }
  }
}

TEST(EntropyTriple, MaximallyEntangled) {
  for (std::size_t d = 2; d <= 5; ++d) {
    const EntropyTriple e = entropy_triple(max_entangled_state(d));
    const double ln_d = std::log(static_cast<double>(d));
    EXPECT_NEAR(e.s_system, ln_d, 1e-12);
    EXPECT_NEAR(e.s_ancilla, ln_d, 1e-12);
    EXPECT_NEAR(e.s_joint, 0.0, 1e-10);
    EXPECT_NEAR(e.cond_system_given_ancilla(), -ln_d, 1e-10);
    EXPECT_NEAR(e.mutual_information(), 2.0 * ln_d, 1e-10);
  }
}

TEST(EntropyTriple, SubadditivityAndArakiLieb) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const DensityMatrix rho = testkit::random_state({2, 3}, rng, 1 + trial % 6);
    const EntropyTriple e = entropy_triple(rho);
    EXPECT_LE(e.s_joint, e.s_system + e.s_ancilla + 1e-10);
    EXPECT_GE(e.s_joint, std::abs(e.s_system - e.s_ancilla) - 1e-10);
  }
}

TEST(EntropyTriple, RequiresBipartite) {
  EXPECT_THROW(entropy_triple(maximally_mixed(4)), Error);
}

TEST(Ladder, QubitConventionsAgree) {
  const LadderPair a = ladder_operators(2, LadderConvention::Spin);
  const LadderPair b = ladder_operators(2, LadderConvention::TruncatedOscillator);
  EXPECT_LT((a.plus - b.plus).norm(), 1e-15);
  EXPECT_EQ(a.plus(1, 0), cplx(1.0, 0.0));
}

TEST(Ladder, SpinCommutator) {
  // [J+, J-] = 2 Jz with Jz = diag(-j, ..., j)
  for (std::size_t d = 2; d <= 6; ++d) {
    const LadderPair p = ladder_operators(d, LadderConvention::Spin);
    const auto n = static_cast<Eigen::Index>(d);
    const double j = 0.5 * static_cast<double>(d - 1);
    CMatrix jz = CMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) jz(k, k) = -j + static_cast<double>(k);
    EXPECT_LT((p.plus * p.minus - p.minus * p.plus - 2.0 * jz).norm(), 1e-12);
  }
}

TEST(Ladder, OscillatorAmplitudes) {
  const LadderPair p = ladder_operators(4, LadderConvention::TruncatedOscillator);
  EXPECT_NEAR(p.plus(3, 2).real(), std::sqrt(3.0), 1e-15);
  EXPECT_LT((p.minus - p.plus.adjoint()).norm(), 1e-15);
  EXPECT_THROW(ladder_operators(1, LadderConvention::Spin), Error);
}
