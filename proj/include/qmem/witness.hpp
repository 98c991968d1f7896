#pragma once

// Entropic quantum-memory witness. For a system-ancilla probe evolved by
// (E_t (x) 1)[rho_0], a dynamics (E_t1, E_t2) that is realizable with
// classical memory always satisfies
//
//   S_S[rho_t1] >= max{ -S_{S|A}[rho_t2], -S_{A|S}[rho_t2] }.
//
// The witness is delta_s = S_S[rho_t1] - max{...}; delta_s < 0 proves that
// quantum memory is required. delta_s >= 0 proves nothing.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "qmem/extrema.hpp"
#include "qmem/gaussian.hpp"
#include "qmem/lindblad.hpp"
#include "qmem/qstate.hpp"

namespace qmem {

/// delta_s must be below -kDetectionThreshold to count as a detection.
inline constexpr double kDetectionThreshold = 1e-9;

struct WitnessReport {
  std::optional<double> t1;
  std::optional<double> t2;
  double s_sys_t1 = 0.0;        ///< S_S[rho_t1]
  double neg_cond_sa_t2 = 0.0;  ///< -S_{S|A}[rho_t2]
  double neg_cond_as_t2 = 0.0;  ///< -S_{A|S}[rho_t2]
  double delta_s = 0.0;
  bool quantum_memory_detected = false;

  static WitnessReport from_parts(double s_sys_t1, double neg_cond_sa_t2, double neg_cond_as_t2,
                                  std::optional<double> t1 = std::nullopt, std::optional<double> t2 = std::nullopt) {
    if (t1 && t2 && !(*t1 < *t2)) throw Error(ErrorKind::InvalidArgument, "witness times must satisfy t1 < t2");
    WitnessReport r;
    r.t1 = t1;
    r.t2 = t2;
    r.s_sys_t1 = s_sys_t1;
    r.neg_cond_sa_t2 = neg_cond_sa_t2;
    r.neg_cond_as_t2 = neg_cond_as_t2;
    r.delta_s = s_sys_t1 - std::max(neg_cond_sa_t2, neg_cond_as_t2);
    r.quantum_memory_detected = r.delta_s < -kDetectionThreshold;
    return r;
  }
};

inline WitnessReport evaluate_criterion(const EntropyTriple& at_t1, const EntropyTriple& at_t2,
                                        std::optional<double> t1 = std::nullopt,
                                        std::optional<double> t2 = std::nullopt) {
  return WitnessReport::from_parts(at_t1.s_system, -at_t2.cond_system_given_ancilla(),
                                   -at_t2.cond_ancilla_given_system(), t1, t2);
}

inline WitnessReport evaluate_criterion(const DensityMatrix& rho_t1, const DensityMatrix& rho_t2,
                                        std::optional<double> t1 = std::nullopt,
                                        std::optional<double> t2 = std::nullopt) {
  if (rho_t1.subsystems() != 2 || rho_t2.subsystems() != 2)
    throw Error(ErrorKind::InvalidSubsystem, "witness needs bipartite system-ancilla states");
  if (rho_t1.dims() != rho_t2.dims()) throw Error(ErrorKind::DimensionMismatch, "states have different dimensions");
  return evaluate_criterion(entropy_triple(rho_t1), entropy_triple(rho_t2), t1, t2);
}

/// Same criterion for Gaussian two-mode states (system mode first).
inline WitnessReport evaluate_gaussian_criterion(const TwoModeBlocks& state_t1, const TwoModeBlocks& state_t2,
                                                 std::optional<double> t1 = std::nullopt,
                                                 std::optional<double> t2 = std::nullopt) {
  const GaussianEntropies e = gaussian_entropies(state_t1, state_t2);
  return WitnessReport::from_parts(e.s_system_t1, e.s_ancilla_t2 - e.s_joint_t2, e.s_system_t2 - e.s_joint_t2, t1, t2);
}

struct EntropySample {
  double t = 0.0;
  EntropyTriple e;

  double neg_cond_sa() const { return -e.cond_system_given_ancilla(); }
  double neg_cond_as() const { return -e.cond_ancilla_given_system(); }
};

using EntropyEvaluator = std::function<EntropyTriple(double)>;

struct TimeSearchOptions {
  /// Differences below this are treated as integrator noise.
  double noise_floor = 1e-10;
  /// Refinement stops once the bracket is narrower than this fraction of
  /// the sampled time span.
  double time_tolerance_fraction = 1e-6;
};

struct WitnessTimes {
  double t1 = 0.0;
  double t2 = 0.0;
  std::size_t index1 = 0;  ///< grid index closest to t1
  std::size_t index2 = 0;
  EntropyTriple at_t1;
  EntropyTriple at_t2;
  /// Further maxima of -S_{S|A} after t2 (diagnostics only).
  std::vector<double> later_maxima_t;
  std::vector<double> later_maxima_value;
};

namespace detail {

struct Refined {
  double t;
  EntropyTriple e;
};

// Golden-section search for the extremum of `key` inside the grid bracket
// around `i`, or a parabolic vertex when no evaluator is available.
inline Refined refine_extremum(const std::vector<EntropySample>& traj, std::size_t i,
                               const std::function<double(const EntropyTriple&)>& key, bool maximize,
                               const EntropyEvaluator& evaluate, double time_tol) {
  const double sign = maximize ? -1.0 : 1.0;
  const EntropySample& lo = traj[i - 1];
  const EntropySample& mid = traj[i];
  const EntropySample& hi = traj[i + 1];

  if (!evaluate) {
    const double x0 = lo.t, x1 = mid.t, x2 = hi.t;
    const double y0 = key(lo.e), y1 = key(mid.e), y2 = key(hi.e);
    const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if (a == 0.0 || !std::isfinite(a)) return {mid.t, mid.e};
    const double tv = std::clamp(-b / (2.0 * a), x0, x2);
    auto lagrange = [&](double v0, double v1, double v2) {
      return v0 * (tv - x1) * (tv - x2) / ((x0 - x1) * (x0 - x2)) + v1 * (tv - x0) * (tv - x2) / ((x1 - x0) * (x1 - x2)) +
             v2 * (tv - x0) * (tv - x1) / ((x2 - x0) * (x2 - x1));
    };
    EntropyTriple e;
    e.s_system = lagrange(lo.e.s_system, mid.e.s_system, hi.e.s_system);
    e.s_ancilla = lagrange(lo.e.s_ancilla, mid.e.s_ancilla, hi.e.s_ancilla);
    e.s_joint = lagrange(lo.e.s_joint, mid.e.s_joint, hi.e.s_joint);
    return {tv, e};
  }

  Refined best{mid.t, mid.e};
  double best_val = sign * key(mid.e);
  auto probe = [&](double t) {
    const EntropyTriple e = evaluate(t);
    const double v = sign * key(e);
    if (v < best_val) {
      best_val = v;
      best = {t, e};
    }
    return v;
  };
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo.t, b = hi.t;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = probe(c), fd = probe(d);
  while (b - a > time_tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = probe(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = probe(d);
    }
  }
  return best;
}

}  // namespace detail

/// t1 = first interior local minimum of S_S(t); t2 = first local maximum of
/// -S_{S|A}(t) after t1. Both are refined inside their grid bracket, by
/// golden-section search on re-evaluated states when `evaluate` is given
/// and by a parabolic fit otherwise.
inline WitnessTimes find_witness_times(const std::vector<EntropySample>& traj, const EntropyEvaluator& evaluate = {},
                                       const TimeSearchOptions& options = {}) {
  if (traj.size() < 3) throw Error(ErrorKind::ExtremumNotFound, "trajectory too short");
  for (std::size_t i = 1; i < traj.size(); ++i)
    if (!(traj[i].t > traj[i - 1].t)) throw Error(ErrorKind::InvalidArgument, "trajectory times must increase");

  std::vector<double> s_sys(traj.size()), neg_sa(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    s_sys[i] = traj[i].e.s_system;
    neg_sa[i] = traj[i].neg_cond_sa();
  }

  std::optional<std::size_t> i1;
  for (const Extremum& x : turning_points(s_sys, options.noise_floor))
    if (x.type == ExtremumType::Minimum) {
      i1 = x.index;
      break;
    }
  if (!i1) throw Error(ErrorKind::ExtremumNotFound, "S_S(t) has no interior local minimum on the grid");

  std::vector<std::size_t> maxima;
  for (const Extremum& x : turning_points(neg_sa, options.noise_floor, *i1))
    if (x.type == ExtremumType::Maximum && x.index > *i1) maxima.push_back(x.index);
  if (maxima.empty()) throw Error(ErrorKind::ExtremumNotFound, "-S_{S|A}(t) has no local maximum after t1");

  const double time_tol = options.time_tolerance_fraction * (traj.back().t - traj.front().t);
  const auto r1 = detail::refine_extremum(
      traj, *i1, [](const EntropyTriple& e) { return e.s_system; }, false, evaluate, time_tol);
  const auto r2 = detail::refine_extremum(
      traj, maxima.front(), [](const EntropyTriple& e) { return -e.cond_system_given_ancilla(); }, true, evaluate,
      time_tol);
  if (!(r1.t < r2.t)) throw Error(ErrorKind::ExtremumNotFound, "refined extrema are not ordered");

  WitnessTimes w;
  w.t1 = r1.t;
  w.t2 = r2.t;
  w.index1 = *i1;
  w.index2 = maxima.front();
  w.at_t1 = r1.e;
  w.at_t2 = r2.e;
  for (std::size_t k = 1; k < maxima.size(); ++k) {
    w.later_maxima_t.push_back(traj[maxima[k]].t);
    w.later_maxima_value.push_back(neg_sa[maxima[k]]);
  }
  return w;
}

/// -S_{S|A}(t) >= -S_{A|S}(t) - 1e-9 everywhere, which holds along every
/// trajectory started from a maximally entangled probe.
inline bool ordering_check(const std::vector<EntropySample>& traj, double tolerance = 1e-9) {
  return std::all_of(traj.begin(), traj.end(),
                     [tolerance](const EntropySample& s) { return s.neg_cond_sa() >= s.neg_cond_as() - tolerance; });
}

struct QuditOptions {
  /// Trajectory end in units of 1 / omega.
  double omega_t_max = 12.0;
  std::size_t points = 2001;
  TimeSearchOptions search;
  OdeOptions ode;
};

inline std::vector<EntropySample> qudit_entropy_trajectory(const LindbladModel& model, std::span<const double> grid,
                                                           const OdeOptions& ode = {},
                                                           const DensityMatrix& memory = memory_ground_state()) {
  const std::vector<ChoiSample> choi = reduced_choi_trajectory(model, grid, ode, memory);
  std::vector<EntropySample> out;
  out.reserve(choi.size());
  for (const ChoiSample& s : choi) out.push_back({s.t, entropy_triple(s.rho_sa)});
  return out;
}

struct QuditAnalysis {
  LindbladModel model;
  std::vector<EntropySample> samples;
  WitnessTimes times;
  WitnessReport report;
};

/// Choi-probe trajectory, witness times and the resulting report for one
/// qudit model.
inline QuditAnalysis analyze_qudit(const LindbladModel& model, const QuditOptions& options = {}) {
  model.validate();
  if (!(options.omega_t_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_max must be positive");
  const std::vector<double> grid = uniform_grid(options.omega_t_max / model.omega, options.points);
  QuditAnalysis out;
  out.model = model;
  out.samples = qudit_entropy_trajectory(model, grid, options.ode);
  ChoiFlow flow(model, options.ode);
  const EntropyEvaluator evaluate = [&flow](double t) { return entropy_triple(flow.at(t)); };
  out.times = find_witness_times(out.samples, evaluate, options.search);
  out.report = evaluate_criterion(out.times.at_t1, out.times.at_t2, out.times.t1, out.times.t2);
  return out;
}

struct QuditScanRow {
  std::size_t d = 0;
  double gamma_over_omega = 0.0;
  double t1 = std::nan("");
  double t2 = std::nan("");
  double delta_s = std::nan("");
  bool detected = false;
  std::string error;  ///< empty on success

  bool ok() const { return error.empty(); }
};

/// Runs `task(i)` for i in [0, count) on up to `workers` threads.
template <class Task>
void parallel_for(std::size_t count, Task&& task, std::size_t workers = 0) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  for (auto& th : pool) th.join();
}

inline QuditScanRow qudit_scan_cell(std::size_t d, double ratio, LadderConvention convention,
                                    const QuditOptions& options) {
  QuditScanRow row;
  row.d = d;
  row.gamma_over_omega = ratio;
  try {
    const QuditAnalysis a = analyze_qudit(LindbladModel{d, 1.0, ratio, convention}, options);
    row.t1 = a.report.t1.value_or(std::nan(""));
    row.t2 = a.report.t2.value_or(std::nan(""));
    row.delta_s = a.report.delta_s;
    row.detected = a.report.quantum_memory_detected;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

/// Witness over a (d, gamma/omega) grid with omega = 1. Per-cell failures
/// are recorded in the row; rows are ordered by d, then ratio.
inline std::vector<QuditScanRow> scan_qudit(const std::vector<std::size_t>& d_list,
                                            const std::vector<double>& ratios, LadderConvention convention,
                                            const QuditOptions& options = {}, std::size_t workers = 0) {
  if (d_list.empty()) throw Error(ErrorKind::InvalidArgument, "dimension list is empty");
  if (ratios.empty()) throw Error(ErrorKind::InvalidArgument, "ratio grid is empty");
  std::vector<QuditScanRow> rows(d_list.size() * ratios.size());
  parallel_for(
      rows.size(),
      [&](std::size_t k) {
        rows[k] = qudit_scan_cell(d_list[k / ratios.size()], ratios[k % ratios.size()], convention, options);
      },
      workers);
  return rows;
}

struct CriticalRatio {
  double ratio = 0.0;  ///< midpoint of the final bracket
  double below = 0.0;  ///< largest ratio known to detect
  double above = 0.0;  ///< smallest ratio known not to detect
};

/// Smallest gamma/omega on `coarse` (ascending) where the witness stops
/// detecting, bisected to `tolerance`. Empty if the witness never detects
/// at the first coarse point or never stops detecting.
inline std::optional<CriticalRatio> critical_ratio(std::size_t d, const std::vector<double>& coarse,
                                                   LadderConvention convention, const QuditOptions& options = {},
                                                   double tolerance = 1e-4) {
  auto detects = [&](double ratio) { return qudit_scan_cell(d, ratio, convention, options).detected; };
  if (coarse.empty() || !detects(coarse.front())) return std::nullopt;
  for (std::size_t k = 1; k < coarse.size(); ++k) {
    if (detects(coarse[k])) continue;
    double lo = coarse[k - 1], hi = coarse[k];
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      (detects(mid) ? lo : hi) = mid;
    }
    return CriticalRatio{0.5 * (lo + hi), lo, hi};
  }
  return std::nullopt;
}

}  // namespace qmem
