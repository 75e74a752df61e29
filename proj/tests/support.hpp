#pragma once

#include <random>

#include "alignmark/matrix.hpp"
#include "oracle.hpp"

namespace test_support {

inline oracle::Grid to_grid(const alignmark::BinaryMatrix& m) {
  oracle::Grid g(m.rows(), std::vector<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) g[i][j] = m.at(i, j) ? 1 : 0;
  return g;
}

inline alignmark::BinaryMatrix random_matrix(std::mt19937_64& rng, int rows, int cols, double density = 0.5) {
  return alignmark::BinaryMatrix::from_rows(oracle::random_grid(rng, rows, cols, density));
}

// Random shape with both sides in [1, max_side].
inline alignmark::BinaryMatrix random_shape(std::mt19937_64& rng, int max_side) {
  std::uniform_int_distribution<int> side(1, max_side);
  std::uniform_real_distribution<double> density(0.1, 0.9);
  const int rows = side(rng);
  const int cols = side(rng);
  return random_matrix(rng, rows, cols, density(rng));
}

}  // namespace test_support
