#pragma once

#include <random>

#include "ncg/fock_algebra.hpp"

namespace ncg::testing {

inline CMatrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) m(i, j) = {nd(rng), nd(rng)};
  }
  return m;
}

/// Random element supported on m, n < trunc - margin.
inline TruncatedElement random_interior(int trunc, int margin, double theta, std::mt19937_64& rng,
                                        bool hermitian = false) {
  CMatrix m = random_matrix(trunc, rng);
  if (hermitian) m = 0.5 * (m + m.adjoint()).eval();
  return TruncatedElement(m, theta).interior_projected(margin);
}

inline double rel_err(const CMatrix& a, const CMatrix& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / scale;
}

}  // namespace ncg::testing
