#pragma once

#include <random>
#include <vector>

#include "qmem/qmem.hpp"

namespace qmem::testkit {

inline CMatrix ginibre(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = cplx(n(rng), n(rng));
  return g;
}

inline CMatrix random_unitary(Eigen::Index d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<CMatrix> qr(ginibre(d, d, rng));
  return qr.householderQ() * CMatrix::Identity(d, d);
}

/// Random state of full rank `rank` (Hilbert-Schmidt measure when rank = n).
inline DensityMatrix random_state(const Dims& dims, std::mt19937_64& rng, Eigen::Index rank = 0) {
  const auto n = static_cast<Eigen::Index>(product(dims));
  const CMatrix g = ginibre(n, rank > 0 ? rank : n, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(rho, dims);
}

/// Kraus operators of a random channel on C^d with `k` operators.
inline std::vector<CMatrix> random_kraus(Eigen::Index d, Eigen::Index k, std::mt19937_64& rng) {
  Eigen::HouseholderQR<CMatrix> qr(ginibre(d * k, d, rng));
  const CMatrix v = qr.householderQ() * CMatrix::Identity(d * k, d);
  std::vector<CMatrix> ks;
  for (Eigen::Index i = 0; i < k; ++i) ks.push_back(v.block(i * d, 0, d, d));
  return ks;
}

/// (K (x) 1) rho (K (x) 1)^dagger summed over K, acting on the first factor.
inline CMatrix apply_on_system(const std::vector<CMatrix>& kraus, const CMatrix& rho, Eigen::Index ancilla_dim) {
  const CMatrix id = CMatrix::Identity(ancilla_dim, ancilla_dim);
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const CMatrix& k : kraus) {
    const CMatrix big = kron(k, id);
    out += big * rho * big.adjoint();
  }
  return 0.5 * (out + out.adjoint());
}

}  // namespace qmem::testkit
