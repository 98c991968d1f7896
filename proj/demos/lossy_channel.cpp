// Lossy-channel witness: transmissivity drop eta1 at t1, partial recovery to
// eta2 at t2, probed with a two-mode squeezed vacuum.

#include <cstdio>

#include "qmem/qmem.hpp"

int main() {
  const double pairs[][2] = {{0.6, 0.3}, {0.9, 0.1}, {1.0, 0.0}, {0.3, 0.6}};
  std::printf("%6s %6s %10s %12s\n", "eta1", "eta2", "r*", "delta_S_min");
  for (const auto& p : pairs) {
    const qmem::SqueezingOptimum best = qmem::minimize_delta_S_over_r(p[0], p[1]);
    std::printf("%6.2f %6.2f %10.4f %12.6f\n", p[0], p[1], best.r_star, best.delta_s);
  }

  // The same quantity assembled from covariance matrices.
  const qmem::TwoModeBlocks probe = qmem::two_mode_squeezed(1.0);
  const qmem::TwoModeBlocks s1 = qmem::apply_channel(probe, qmem::lossy_channel(0.6));
  const qmem::TwoModeBlocks s2 = qmem::apply_channel(probe, qmem::lossy_channel(0.3));
  const qmem::WitnessReport r = qmem::evaluate_gaussian_criterion(s1, s2, 1.0, 2.0);
  std::printf("r = 1: delta_S = %.12f (closed form %.12f)\n", r.delta_s, qmem::delta_S_lossy(0.6, 0.3, 1.0));
  return 0;
}
