#include "mema/tiling.hpp"

#include <string>

#include "mema/error.hpp"

namespace mema {

void validate(const TileShape& t) {
  if (t.m < 1 || t.k < 1 || t.n < 1) throw Error("tile dimensions must be >= 1");
}

double arithmetic_intensity_of_tile(std::int64_t m, std::int64_t n) {
  if (m < 1 || n < 1) throw Error("tile dimensions must be >= 1");
  return static_cast<double>(m * n) / static_cast<double>(m + n);
}

std::int64_t derive_square_tile(std::int64_t reuse_registers) {
  if (reuse_registers < 3) throw Error("no feasible tile");
  std::int64_t t = 1;
  while (2 * (t + 1) + (t + 1) * (t + 1) <= reuse_registers) ++t;
  return t;
}

TileShape best_outer_product_tile(std::int64_t reuse_registers) {
  if (reuse_registers < 3) throw Error("no feasible tile");
  TileShape best{1, 1, 1};
  // Compare mn/(m+n) by cross-multiplication to keep ties exact.
  auto better = [](std::int64_t m, std::int64_t n, const TileShape& cur) {
    const std::int64_t lhs = m * n * (cur.m + cur.n);
    const std::int64_t rhs = cur.m * cur.n * (m + n);
    if (lhs != rhs) return lhs > rhs;
    return m != cur.m ? m > cur.m : n > cur.n;
  };
  for (std::int64_t m = 1; 1 + 2 * m <= reuse_registers; ++m) {
    for (std::int64_t n = 1; m + n + m * n <= reuse_registers; ++n) {
      if (better(m, n, best)) best = {m, 1, n};
    }
  }
  return best;
}

TileShape named_tile(std::string_view name) {
  if (name == "q15-dsp-4x2x2") return {4, 2, 2};
  if (name == "a72-8x1x12") return {8, 1, 12};
  throw Error("unknown named tile: " + std::string(name));
}

CBBlock derive_cake_block(std::int64_t cores, std::int64_t local_memory_elems) {
  if (cores < 1) throw Error("core count must be >= 1");
  const std::int64_t per_unit = 2 * cores + cores * cores;
  if (local_memory_elems < per_unit) throw Error("local memory too small for a CB block");
  std::int64_t m = 1;
  while ((m + 1) * (m + 1) * per_unit <= local_memory_elems) ++m;
  return {cores, m, m, m};
}

double cake_offchip_bw(std::int64_t m, std::int64_t n, double f) {
  if (m < 1 || n < 1) throw Error("tile dimensions must be >= 1");
  if (!(f > 0.0)) throw Error("per-core throughput must be positive");
  return Fraction::reduced(m + n, m * n).times(f);
}

}  // namespace mema
