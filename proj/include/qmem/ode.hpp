#pragma once

// Adaptive explicit Runge-Kutta integration (Dormand-Prince 5(4), FSAL)
// for linear-algebra state types (Eigen vectors and matrices).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qmem/error.hpp"

namespace qmem {

struct OdeOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  /// 0 selects a step from the initial derivative.
  double initial_step = 0.0;
  /// Relative to max(1, |t|); a smaller accepted step is an integration failure.
  double min_step = 1e-14;
  std::size_t max_steps = 50'000'000;
};

/// Validates that `grid` is non-empty, starts at 0 and is strictly increasing.
inline void check_time_grid(std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "time grid is empty");
  if (grid.front() != 0.0) throw Error(ErrorKind::InvalidArgument, "time grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::InvalidArgument, "time grid must be strictly increasing");
}

inline std::vector<double> uniform_grid(double t_max, std::size_t points) {
  if (points < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least two points");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw Error(ErrorKind::InvalidArgument, "grid end must be positive");
  std::vector<double> grid(points);
  const double n = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = t_max * (static_cast<double>(i) / n);
  return grid;
}

template <class State, class Rhs>
class DormandPrince {
 public:
  DormandPrince(Rhs rhs, OdeOptions options = {}) : rhs_(std::move(rhs)), opt_(options) {}

  std::size_t accepted_steps() const noexcept { return accepted_; }
  std::size_t rejected_steps() const noexcept { return rejected_; }

  /// Integrates y from t to t_end in place; t ends exactly at t_end.
  void advance(double& t, State& y, double t_end) {
    if (t_end == t) return;
    if (t_end < t) throw Error(ErrorKind::InvalidArgument, "backward integration is not supported");
    if (!have_k1_ || t != t_k1_) {
      k1_ = rhs_(t, y);
      have_k1_ = true;
      t_k1_ = t;
    }
    if (!(h_ > 0.0)) h_ = initial_step(y, t_end - t);

    while (t < t_end) {
      const double remaining = t_end - t;
      bool last = false;
      double h = h_;
      if (h >= remaining) {
        h = remaining;
        last = true;
      }
      if (h < opt_.min_step * std::max(1.0, std::abs(t)) && !last)
        throw Error(ErrorKind::IntegrationFailure, "step size underflow at t = " + std::to_string(t));
      if (accepted_ + rejected_ >= opt_.max_steps)
        throw Error(ErrorKind::IntegrationFailure, "step budget exhausted at t = " + std::to_string(t));

      const double err = attempt(t, y, h);
      if (err <= 1.0) {
        ++accepted_;
        t = last ? t_end : t + h;
        y = y_new_;
        k1_ = k7_;
        t_k1_ = t;
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // a step shortened to hit the interval end says nothing about the
        // admissible step, so keep the previous proposal in that case
        if (!last || h >= h_) h_ = h * factor;
      } else {
        ++rejected_;
        h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      }
    }
  }

 private:
  double scaled_error(const State& y, const State& y_new, const State& err) const {
    double worst = 0.0;
    const auto n = err.size();
    const auto* e = err.data();
    const auto* a = y.data();
    const auto* b = y_new.data();
    for (decltype(err.size()) i = 0; i < n; ++i) {
      const double scale = opt_.abs_tol + opt_.rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
      worst = std::max(worst, std::abs(e[i]) / scale);
    }
    return worst;
  }

  double initial_step(const State& y, double span) {
    if (opt_.initial_step > 0.0) return std::min(opt_.initial_step, span);
    const double d0 = y.cwiseAbs().maxCoeff();
    const double d1 = k1_.cwiseAbs().maxCoeff();
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    return std::min(h, span);
  }

  double attempt(double t, const State& y, double h) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    k2_ = rhs_(t + c2 * h, State(y + h * (a21 * k1_)));
    k3_ = rhs_(t + c3 * h, State(y + h * (a31 * k1_ + a32 * k2_)));
    k4_ = rhs_(t + c4 * h, State(y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_)));
    k5_ = rhs_(t + c5 * h, State(y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_)));
    k6_ = rhs_(t + h, State(y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_)));
    y_new_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
    k7_ = rhs_(t + h, y_new_);
    const State err = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    return scaled_error(y, y_new_, err);
  }

  Rhs rhs_;
  OdeOptions opt_;
  double h_ = 0.0;
  bool have_k1_ = false;
  double t_k1_ = 0.0;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_, y_new_;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
};

/// Solution of y' = rhs(t, y), y(grid[0]) = y0, sampled at every grid time.
/// The first entry is y0 itself.
template <class State, class Rhs>
std::vector<State> integrate_on_grid(Rhs rhs, const State& y0, std::span<const double> grid, OdeOptions options = {}) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "time grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::InvalidArgument, "time grid must be strictly increasing");
  std::vector<State> out;
  out.reserve(grid.size());
  out.push_back(y0);
  DormandPrince<State, Rhs> stepper(std::move(rhs), options);
  double t = grid[0];
  State y = y0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    stepper.advance(t, y, grid[i]);
    out.push_back(y);
  }
  return out;
}

}  // namespace qmem
