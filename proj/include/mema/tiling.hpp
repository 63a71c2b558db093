#pragma once

#include <cstdint>
#include <numeric>
#include <string_view>

namespace mema {

/// m x k x n computation block: A tile m x k, B tile k x n, C tile m x n.
struct TileShape {
  std::int64_t m = 1;
  std::int64_t k = 1;
  std::int64_t n = 1;

  bool operator==(const TileShape&) const = default;
};

void validate(const TileShape& t);

/// Register budget of a rank-1 outer-product tile: m + n inputs plus m*n
/// accumulators.
inline std::int64_t register_footprint(const TileShape& t) {
  return t.m + t.n + t.m * t.n;
}

inline bool fits_registers(const TileShape& t, std::int64_t reuse_registers) {
  return register_footprint(t) <= reuse_registers;
}

/// mn / (m + n).
double arithmetic_intensity_of_tile(std::int64_t m, std::int64_t n);

/// Largest t with 2t + t^2 <= reuse_registers.
std::int64_t derive_square_tile(std::int64_t reuse_registers);

/// Exhaustive search over all m x 1 x n outer-product tiles that fit the
/// budget. Ties go to larger m, then larger n.
TileShape best_outer_product_tile(std::int64_t reuse_registers);

/// Named register tiles that are not derived from the register budget.
/// "q15-dsp-4x2x2" is the dual-MAC Q15 shape; "a72-8x1x12" the A72 core
/// microkernel.
TileShape named_tile(std::string_view name);

/// Constant-bandwidth block: p^2 sub-blocks of m x k x n arranged as a
/// pm x k x pn block.
struct CBBlock {
  std::int64_t p = 1;
  std::int64_t m = 1;
  std::int64_t k = 1;
  std::int64_t n = 1;

  std::int64_t block_m() const { return p * m; }
  std::int64_t block_n() const { return p * n; }
  /// pmk + kpn + p^2 mn
  std::int64_t footprint() const { return p * m * k + k * p * n + p * p * m * n; }

  bool operator==(const CBBlock&) const = default;
};

/// Square sub-blocks (m = k = n): the largest m with m^2 (2p + p^2) <= LM.
CBBlock derive_cake_block(std::int64_t cores, std::int64_t local_memory_elems);

/// Reduced non-negative fraction. Rates computed through the same reduced
/// fraction produce bit-identical doubles.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction reduced(std::int64_t num, std::int64_t den) {
    const std::int64_t g = std::gcd(num, den);
    return g == 0 ? Fraction{0, 1} : Fraction{num / g, den / g};
  }
  double times(double x) const {
    return static_cast<double>(num) / static_cast<double>(den) * x;
  }
  bool operator==(const Fraction&) const = default;
};

/// ((m + n) / (m n)) * f. Does not depend on the core count.
double cake_offchip_bw(std::int64_t m, std::int64_t n, double f);

}  // namespace mema
