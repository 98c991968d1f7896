#pragma once

// Damped harmonic oscillator coupled to a zero-temperature bath with
// exponential correlation function
//
//   alpha(tau) = |g|^2 exp(-kappa tau - i Omega tau).
//
// The amplitude c_t obeys the time-local equation
//
//   c'' + (kappa + i omega + i Omega) c' + [|g|^2 + i omega (kappa + i Omega)] c = 0,
//   c(0) = 1,  c'(0) = -i omega,
//
// and fixes the exact master-equation coefficients G_t = -(c' + i omega c) / c,
// gamma_t = 2 Re G_t, omega_t = omega + Im G_t. The induced Gaussian channel
// is a lossy channel with eta_t = 1 - |c_t|^2 followed by a phase-space
// rotation by Phi_t = int_0^t omega_s ds.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmem/extrema.hpp"
#include "qmem/gaussian.hpp"
#include "qmem/ode.hpp"

namespace qmem {

struct DhoParams {
  double g2 = 1.0;         ///< |g|^2, coupling strength squared (1/time^2)
  double kappa = 0.25;     ///< bath memory decay rate (1/time)
  double omega = 1.0;      ///< system frequency (1/time)
  double omega_big = 1.0;  ///< bath central frequency Omega (1/time)

  void validate() const {
    if (!(g2 >= 0.0) || !std::isfinite(g2)) throw Error(ErrorKind::InvalidArgument, "g2 must be >= 0");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw Error(ErrorKind::InvalidArgument, "kappa must be positive");
    if (!std::isfinite(omega) || !std::isfinite(omega_big))
      throw Error(ErrorKind::InvalidArgument, "frequencies must be finite");
  }
};

/// |c| below this makes Gamma_t = -ln|c|^2 meaningless.
inline constexpr double kAmplitudeFloor = 1e-12;

struct AmplitudeSample {
  double t = 0.0;
  std::complex<double> c;
  std::complex<double> c_dot;
};

inline std::vector<AmplitudeSample> dho_amplitude(const DhoParams& p, std::span<const double> t_grid,
                                                  const OdeOptions& options = {}) {
  p.validate();
  check_time_grid(t_grid);
  using cd = std::complex<double>;
  const cd damping(p.kappa, p.omega + p.omega_big);
  const cd stiffness = cd(p.g2, 0.0) + cd(0.0, p.omega) * cd(p.kappa, p.omega_big);
  auto rhs = [damping, stiffness](double, const Eigen::Vector2cd& y) {
    Eigen::Vector2cd dy;
    dy(0) = y(1);
    dy(1) = -damping * y(1) - stiffness * y(0);
    return dy;
  };
  const Eigen::Vector2cd y0(cd(1.0, 0.0), cd(0.0, -p.omega));
  const std::vector<Eigen::Vector2cd> ys = integrate_on_grid<Eigen::Vector2cd>(rhs, y0, t_grid, options);
  std::vector<AmplitudeSample> out(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) out[i] = {t_grid[i], ys[i](0), ys[i](1)};
  return out;
}

struct DhoCoefficients {
  std::complex<double> g;  ///< G_t (1/time)
  double gamma_t = 0.0;    ///< 2 Re G_t
  double omega_t = 0.0;    ///< omega + Im G_t
};

inline DhoCoefficients dho_coefficients(std::complex<double> c, std::complex<double> c_dot, const DhoParams& p) {
  if (std::abs(c) <= kAmplitudeFloor)
    throw Error(ErrorKind::AmplitudeVanishing, "|c| = " + std::to_string(std::abs(c)));
  const std::complex<double> g = -(c_dot + std::complex<double>(0.0, p.omega) * c) / c;
  return {g, 2.0 * g.real(), p.omega + g.imag()};
}

/// Amplitude, loss and master-equation rates at one time.
struct DhoSample {
  double t = 0.0;
  std::complex<double> c;
  std::complex<double> c_dot;
  double eta = 0.0;      ///< 1 - |c|^2
  double gamma_t = 0.0;  ///< 0 where degenerate
  double omega_t = 0.0;  ///< omega where degenerate
  double phi = 0.0;      ///< int_0^t omega_s ds (trapezoidal)
  bool degenerate = false;  ///< |c| <= kAmplitudeFloor
};

inline std::vector<DhoSample> dho_trajectory(const DhoParams& p, std::span<const double> t_grid,
                                             const OdeOptions& options = {}) {
  const std::vector<AmplitudeSample> amps = dho_amplitude(p, t_grid, options);
  std::vector<DhoSample> out(amps.size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    DhoSample& s = out[i];
    s.t = amps[i].t;
    s.c = amps[i].c;
    s.c_dot = amps[i].c_dot;
    s.eta = 1.0 - std::norm(s.c);
    if (std::abs(s.c) <= kAmplitudeFloor) {
      s.degenerate = true;
      s.eta = 1.0;
      s.omega_t = p.omega;
    } else {
      const DhoCoefficients k = dho_coefficients(s.c, s.c_dot, p);
      s.gamma_t = k.gamma_t;
      s.omega_t = k.omega_t;
    }
    if (i > 0) s.phi = out[i - 1].phi + 0.5 * (s.t - out[i - 1].t) * (s.omega_t + out[i - 1].omega_t);
  }
  return out;
}

inline Mat2 rotation(double phi) {
  Mat2 r;
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return r;
}

/// M_t = e^{-Gamma_t/2} R(Phi_t), N_t = (1 - e^{-Gamma_t}) I / 2 with
/// e^{-Gamma_t} = |c_t|^2. Degenerate samples map to full loss.
inline GaussianChannel dho_channel(const DhoSample& s) {
  const double transmissivity = s.degenerate ? 0.0 : std::norm(s.c);
  return {std::sqrt(transmissivity) * rotation(s.phi), 0.5 * (1.0 - transmissivity) * Mat2::Identity()};
}

/// A pair of times t1 < t2 at which the loss has partially reversed.
struct LossReversal {
  double t1 = 0.0;
  double t2 = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  std::size_t index1 = 0;
  std::size_t index2 = 0;
};

/// First local maximum of eta_t followed by the next local minimum, i.e.
/// the first window in which eta decreases. Empty when eta_t is monotone
/// up to `noise_floor`.
inline std::optional<LossReversal> find_loss_reversal(const std::vector<DhoSample>& samples,
                                                      double noise_floor = 1e-10) {
  std::vector<double> eta(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) eta[i] = samples[i].eta;
  const std::vector<Extremum> turns = turning_points(eta, noise_floor);
  for (std::size_t k = 0; k < turns.size(); ++k) {
    if (turns[k].type != ExtremumType::Maximum) continue;
    const std::size_t i1 = turns[k].index;
    std::size_t i2 = i1 + 1;
    if (k + 1 < turns.size()) {
      i2 = turns[k + 1].index;
    } else {
      // confirmed maximum with the curve still falling at the end of the grid
      for (std::size_t i = i1 + 1; i < eta.size(); ++i)
        if (eta[i] < eta[i2]) i2 = i;
    }
    return LossReversal{samples[i1].t, samples[i2].t, eta[i1], eta[i2], i1, i2};
  }
  return std::nullopt;
}

}  // namespace qmem
