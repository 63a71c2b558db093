#pragma once

// Independent reference computations used only by the tests. None of these
// call into the code paths they check.

#include <cstdint>
#include <random>

#include "mema/io_model.hpp"
#include "mema/sim.hpp"

namespace mema::testing {

template <typename Scalar>
Matrix<Scalar> naive_mm(const Matrix<Scalar>& a, const Matrix<Scalar>& b, const Matrix<Scalar>& c) {
  Matrix<Scalar> out = c;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index p = 0; p < a.cols(); ++p) out(i, j) += a(i, p) * b(p, j);
  return out;
}

inline Matrix<std::int64_t> random_int(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                                       std::int64_t lo = -50, std::int64_t hi = 50) {
  std::uniform_int_distribution<std::int64_t> dist(lo, hi);
  Matrix<std::int64_t> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

inline Matrix<double> random_real(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix<double> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

/// External IO counted operand by operand with ceil block counts, valid for
/// ragged edges. Streamed operands are re-read once per iteration of the
/// dimension they do not depend on; the stationary operand is read once.
inline std::int64_t ragged_io_total(const MMProblem& p, const TileShape& t, InnerClass cls,
                                    bool c_zero = false) {
  auto cdiv = [](std::int64_t a, std::int64_t b) { return (a + b - 1) / b; };
  const std::int64_t mt = cdiv(p.M, t.m), kt = cdiv(p.K, t.k), nt = cdiv(p.N, t.n);
  const std::int64_t a_all = p.M * p.K, b_all = p.K * p.N, c_all = p.M * p.N;
  switch (cls) {
    case InnerClass::KFirst:
      return nt * a_all + mt * b_all + (c_zero ? 1 : 2) * c_all;
    case InnerClass::MFirst:
      return nt * a_all + b_all + 2 * kt * c_all - (c_zero ? c_all : 0);
    case InnerClass::NFirst:
      return a_all + mt * b_all + 2 * kt * c_all - (c_zero ? c_all : 0);
  }
  return -1;
}

/// Largest t with 2t + t^2 <= budget, by linear scan.
inline std::int64_t brute_square_tile(std::int64_t budget) {
  std::int64_t best = 0;
  for (std::int64_t t = 1; t <= budget; ++t)
    if (2 * t + t * t <= budget) best = t;
  return best;
}

}  // namespace mema::testing
