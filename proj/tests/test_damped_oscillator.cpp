#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "qmem/damped_oscillator.hpp"

using namespace qmem;
using cd = std::complex<double>;

namespace {

// c(t) = A e^{l1 t} + B e^{l2 t} from the roots of l^2 + b l + k = 0.
cd characteristic_solution(const DhoParams& p, double t) {
  const cd b(p.kappa, p.omega + p.omega_big);
  const cd k = cd(p.g2, 0.0) + cd(0.0, p.omega) * cd(p.kappa, p.omega_big);
  const cd root = std::sqrt(b * b - 4.0 * k);
  const cd l1 = 0.5 * (-b + root), l2 = 0.5 * (-b - root);
  const cd c_dot0(0.0, -p.omega);
  const cd a = (c_dot0 - l2) / (l1 - l2);
  return a * std::exp(l1 * t) + (1.0 - a) * std::exp(l2 * t);
}

}  // namespace

TEST(Dho, MatchesCharacteristicRoots) {
  for (const DhoParams& p : {DhoParams{}, DhoParams{2.0, 0.5, 1.0, 1.7}, DhoParams{0.3, 3.0, 2.0, 0.0}}) {
    const std::vector<double> grid = uniform_grid(20.0, 401);
    for (const AmplitudeSample& s : dho_amplitude(p, grid))
      EXPECT_LT(std::abs(s.c - characteristic_solution(p, s.t)), 1e-8) << "t = " << s.t;
  }
}

TEST(Dho, PhaseIsMinusArgument) {
  // omega_t = -d/dt arg c_t, so Phi_t tracks the unwrapped phase of c_t
  const DhoParams p{1.0, 0.5, 1.0, 1.6};
  const std::vector<DhoSample> samples = dho_trajectory(p, uniform_grid(5.0, 5001));
  double unwrapped = 0.0, prev = 0.0;
  for (const DhoSample& s : samples) {
    ASSERT_FALSE(s.degenerate);
    const double a = std::arg(s.c);
    double step = a - prev;
    step -= 2.0 * M_PI * std::round(step / (2.0 * M_PI));
    unwrapped += step;
    prev = a;
    EXPECT_NEAR(s.phi, -unwrapped, 1e-5) << "t = " << s.t;
  }
}

TEST(Dho, LossRateIntegratesToLogAmplitude) {
  const DhoParams p{1.0, 0.5, 1.0, 1.6};
  const std::vector<DhoSample> s = dho_trajectory(p, uniform_grid(4.0, 4001));
  double integral = 0.0;
  for (std::size_t i = 2; i < s.size(); i += 2) {
    integral += (s[i].t - s[i - 2].t) / 6.0 * (s[i - 2].gamma_t + 4.0 * s[i - 1].gamma_t + s[i].gamma_t);
    EXPECT_NEAR(integral, -std::log(std::norm(s[i].c)), 1e-8) << "t = " << s[i].t;
  }
}

TEST(Dho, NoCouplingMeansNoLoss) {
  const std::vector<DhoSample> s = dho_trajectory(DhoParams{0.0, 0.25, 1.0, 1.0}, uniform_grid(20.0, 201));
  for (const DhoSample& x : s) {
    EXPECT_NEAR(x.eta, 0.0, 1e-8);
    EXPECT_NEAR(x.gamma_t, 0.0, 1e-8);
    EXPECT_NEAR(x.omega_t, 1.0, 1e-8);
  }
  EXPECT_FALSE(find_loss_reversal(s).has_value());
}

TEST(Dho, StrongBathDampingIsMonotone) {
  const std::vector<DhoSample> s = dho_trajectory(DhoParams{1.0, 50.0, 1.0, 1.0}, uniform_grid(20.0, 2001));
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GE(s[i].eta, s[i - 1].eta - 1e-12);
  EXPECT_FALSE(find_loss_reversal(s).has_value());
}

TEST(Dho, DefaultParametersReverseLoss) {
  const std::vector<DhoSample> s = dho_trajectory(DhoParams{}, uniform_grid(20.0, 2001));
  const auto pair = find_loss_reversal(s);
  ASSERT_TRUE(pair.has_value());
  EXPECT_LT(pair->t1, pair->t2);
  EXPECT_LT(pair->eta2, pair->eta1 - 0.1);
  for (const DhoSample& x : s) {
    EXPECT_GE(x.eta, -1e-12);
    EXPECT_LE(x.eta, 1.0 + 1e-12);
    EXPECT_TRUE(cp_check(dho_channel(x)));
  }
}

TEST(Dho, VanishingAmplitude) {
  try {
    dho_coefficients(cd(0.0, 0.0), cd(1.0, 0.0), DhoParams{});
    FAIL() << "expected an exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AmplitudeVanishing);
  }
  DhoSample zero;
  zero.degenerate = true;
  const GaussianChannel ch = dho_channel(zero);
  EXPECT_LT(ch.m.norm(), 1e-15);
  EXPECT_LT((ch.n - 0.5 * Mat2::Identity()).norm(), 1e-15);
}

TEST(Dho, ParameterValidation) {
  EXPECT_THROW(dho_amplitude(DhoParams{-1.0, 0.25, 1.0, 1.0}, uniform_grid(1.0, 3)), Error);
  EXPECT_THROW(dho_amplitude(DhoParams{1.0, 0.0, 1.0, 1.0}, uniform_grid(1.0, 3)), Error);
}
