#pragma once

#include <random>

#include "cascade/numerics.hpp"

namespace test_support {

inline cascade::ComplexMatrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  cascade::ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cascade::Complex(n(rng), n(rng));
  return m;
}

inline cascade::ComplexMatrix random_hermitian(std::mt19937_64& rng, int dim) {
  const auto a = random_matrix(rng, dim, dim);
  return 0.5 * (a + a.adjoint());
}

/// Random unit-trace positive matrix.
inline cascade::ComplexMatrix random_density(std::mt19937_64& rng, int dim) {
  const auto a = random_matrix(rng, dim, dim);
  cascade::ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

inline double max_abs(const cascade::ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace test_support
