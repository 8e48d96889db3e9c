#pragma once

#include <cstdint>
#include <random>

#include "rgfi/graph.hpp"

namespace rgfi::test {

inline Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// explicit sum of matrix powers, no Horner
inline Matrix poly_naive(const Matrix& s, const Vector& h) {
  Matrix out = Matrix::Zero(s.rows(), s.cols());
  Matrix p = Matrix::Identity(s.rows(), s.cols());
  for (Index r = 0; r < h.size(); ++r) {
    out += h(r) * p;
    p = p * s;
  }
  return out;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace rgfi::test
