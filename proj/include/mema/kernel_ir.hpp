#pragma once

#include <cstdint>
#include <vector>

#include "mema/io_model.hpp"

namespace mema {

enum class LoopLevel { Block, Intra };

/// One loop of the lowered nest. Block loops run 0..extent in steps of the
/// tile; intra loops run 0..min(extent, remaining) in unit steps, where
/// extent is the tile size.
struct Loop {
  Dim dim = Dim::M;
  LoopLevel level = LoopLevel::Block;
  std::int64_t extent = 0;
  std::int64_t step = 1;

  bool operator==(const Loop&) const = default;
};

/// Blocked loop nest whose body is the rank-1 update
///   C[i][j] += A[i][p] * B[p][j]
/// Three block loops in schedule order, then the intra-block loops p, i, j.
struct KernelIR {
  MMProblem problem;
  Schedule schedule;
  std::vector<Loop> loops;

  bool operator==(const KernelIR&) const = default;
};

KernelIR lower_schedule(const MMProblem& p, const Schedule& s);

/// Exactly three block loops then three intra loops, each dimension once per
/// level, with bounds matching the problem and tile.
void validate(const KernelIR& ir);

}  // namespace mema
