#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mema/error.hpp"
#include "mema/hw_model.hpp"
#include "mema/io_model.hpp"
#include "mema/kernel_ir.hpp"
#include "mema/tiling.hpp"

namespace mema {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One computation block, clamped at ragged edges.
struct BlockRange {
  std::int64_t i0 = 0, rows = 0;   // M
  std::int64_t p0 = 0, depth = 0;  // K
  std::int64_t j0 = 0, cols = 0;   // N
};

inline std::int64_t extent_of(const MMProblem& p, Dim d) {
  switch (d) {
    case Dim::M: return p.M;
    case Dim::K: return p.K;
    case Dim::N: return p.N;
  }
  return 0;
}

inline std::int64_t extent_of(const TileShape& t, Dim d) {
  switch (d) {
    case Dim::M: return t.m;
    case Dim::K: return t.k;
    case Dim::N: return t.n;
  }
  return 0;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

/// Visits every computation block in the schedule's loop order.
template <typename Visitor>
void for_each_block(const MMProblem& p, const Schedule& s, Visitor&& visit) {
  const auto dims = loop_dims(s.order);
  std::array<std::int64_t, 3> extent{}, step{}, base{};
  for (int level = 0; level < 3; ++level) {
    extent[level] = extent_of(p, dims[level]);
    step[level] = extent_of(s.tile, dims[level]);
  }
  auto emit = [&] {
    BlockRange r;
    for (int level = 0; level < 3; ++level) {
      const std::int64_t len = std::min(step[level], extent[level] - base[level]);
      switch (dims[level]) {
        case Dim::M: r.i0 = base[level]; r.rows = len; break;
        case Dim::K: r.p0 = base[level]; r.depth = len; break;
        case Dim::N: r.j0 = base[level]; r.cols = len; break;
      }
    }
    visit(r);
  };
  for (base[0] = 0; base[0] < extent[0]; base[0] += step[0])
    for (base[1] = 0; base[1] < extent[1]; base[1] += step[1])
      for (base[2] = 0; base[2] < extent[2]; base[2] += step[2]) emit();
}

struct SimOptions {
  bool c_zero = false;
};

/// External accesses counted by executing a schedule against a two-level
/// memory.
struct SimReport {
  std::int64_t loads_A = 0;
  std::int64_t loads_B = 0;
  std::int64_t loads_C = 0;
  std::int64_t stores_C = 0;
  std::int64_t total_elems = 0;
  std::int64_t blocks_executed = 0;
  std::int64_t peak_resident_elems = 0;
  std::optional<double> checksum;  // sum of the computed C, when data was supplied

  bool operator==(const SimReport&) const = default;
};

/// Local memory holds one stationary tile for as long as consecutive blocks
/// keep needing it. Streamed A/B tiles are loaded for every block; streamed C
/// tiles are loaded and stored for every block. Resident data is checked
/// against mk + kn + mn at every block.
SimReport simulate_schedule(const MMProblem& p, const Schedule& s, SimOptions opts = {});

/// Splits a simulation into the IO attributable to the stationary operand
/// and everything else.
IOReport io_report_from_sim(const SimReport& r, const Schedule& s,
                            std::int64_t element_bytes);

struct BestSchedule {
  Schedule schedule;
  SimReport report;
};

/// Simulates all six orders and keeps the minimum total, with the same
/// tie-break as select_schedule.
BestSchedule brute_force_best(const MMProblem& p, const TileShape& t, SimOptions opts = {});

/// Executes the blocked schedule with rank-1 updates per block and returns
/// C + A*B.
template <typename DerivedA, typename DerivedB, typename DerivedC>
Matrix<typename DerivedC::Scalar> run_functional(const Eigen::MatrixBase<DerivedA>& a,
                                                 const Eigen::MatrixBase<DerivedB>& b,
                                                 const Eigen::MatrixBase<DerivedC>& c,
                                                 const Schedule& s) {
  if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols())
    throw Error("operand dimensions do not match");
  validate(s.tile);
  Matrix<typename DerivedC::Scalar> out = c;
  if (out.size() == 0 || a.cols() == 0) return out;
  const MMProblem p{a.rows(), a.cols(), b.cols()};
  for_each_block(p, s, [&](const BlockRange& r) {
    auto c_tile = out.block(r.i0, r.j0, r.rows, r.cols);
    for (std::int64_t q = 0; q < r.depth; ++q)
      c_tile.noalias() += a.block(r.i0, r.p0 + q, r.rows, 1) * b.block(r.p0 + q, r.j0, 1, r.cols);
  });
  return out;
}

/// Simulates and computes in one pass; the report carries the checksum.
template <typename Scalar>
SimReport simulate_with_data(const Matrix<Scalar>& a, const Matrix<Scalar>& b,
                             Matrix<Scalar>& c, const Schedule& s, SimOptions opts = {}) {
  const MMProblem p{a.rows(), a.cols(), b.cols()};
  SimReport report = simulate_schedule(p, s, opts);
  c = run_functional(a, b, c, s);
  report.checksum = static_cast<double>(c.template cast<double>().sum());
  return report;
}

/// Walks the lowered loop nest statement by statement. Independent of
/// run_functional: no Eigen expressions, only scalar indexing.
template <typename Scalar>
Matrix<Scalar> interpret_kernel(const KernelIR& ir, const Matrix<Scalar>& a,
                                const Matrix<Scalar>& b, const Matrix<Scalar>& c,
                                std::int64_t* mac_count = nullptr) {
  validate(ir);
  const MMProblem& p = ir.problem;
  if (a.rows() != p.M || a.cols() != p.K || b.rows() != p.K || b.cols() != p.N ||
      c.rows() != p.M || c.cols() != p.N)
    throw Error("operand dimensions do not match kernel");

  Matrix<Scalar> out = c;
  std::array<std::int64_t, 3> base{}, offset{};
  std::int64_t macs = 0;
  auto idx = [](Dim d) { return static_cast<std::size_t>(d); };

  std::function<void(std::size_t)> run = [&](std::size_t depth) {
    if (depth == ir.loops.size()) {
      const std::int64_t i = base[idx(Dim::M)] + offset[idx(Dim::M)];
      const std::int64_t q = base[idx(Dim::K)] + offset[idx(Dim::K)];
      const std::int64_t j = base[idx(Dim::N)] + offset[idx(Dim::N)];
      out(i, j) += a(i, q) * b(q, j);
      ++macs;
      return;
    }
    const Loop& loop = ir.loops[depth];
    const auto d = idx(loop.dim);
    if (loop.level == LoopLevel::Block) {
      for (std::int64_t v = 0; v < loop.extent; v += loop.step) {
        base[d] = v;
        run(depth + 1);
      }
    } else {
      const std::int64_t limit = std::min(loop.extent, extent_of(p, loop.dim) - base[d]);
      for (std::int64_t v = 0; v < limit; v += loop.step) {
        offset[d] = v;
        run(depth + 1);
      }
      offset[d] = 0;
    }
  };
  run(0);
  if (mac_count) *mac_count = macs;
  return out;
}

struct StreamTimingReport {
  double compute_time_per_row = 0.0;    // seconds
  double writeback_time_per_row = 0.0;  // seconds
  bool hidden = false;
};

/// Whether writing back a finished C row of length row_len_n can overlap the
/// computation of the next one: k * n / peak >= n / bandwidth. The flag is
/// decided on the cross-multiplied form k * bandwidth >= peak.
StreamTimingReport check_streaming_hiding(const HardwareSpec& hw, const TileShape& t,
                                          std::int64_t row_len_n);

/// Executes one CB block on p_cores cores (p^2 sub-blocks, p per round) and
/// returns the external IO divided by the elapsed time.
double measure_cake_bw(std::int64_t p_cores, const CBBlock& block, const HardwareSpec& hw);

std::string to_json(const SimReport& r);
std::string sim_csv_header();
std::string to_csv_row(const MMProblem& p, const Schedule& s, const SimReport& r);

}  // namespace mema
