#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mema {

struct LayerDims {
  std::int64_t layer_id = 0;
  std::int64_t M = 0;
  std::int64_t K = 0;
  std::int64_t N = 0;

  bool operator==(const LayerDims&) const = default;
};

struct BenchmarkFixture {
  std::string name;
  std::vector<LayerDims> layers;
};

/// Directory holding bundled hw/ and fixtures/ data. MEMA_DATA_DIR in the
/// environment overrides the compiled-in location.
std::filesystem::path data_dir();

/// CSV rows "layer_id,M,K,N"; '#' starts a comment, blank lines are skipped.
/// Dimensions must be positive and ids unique.
BenchmarkFixture parse_fixture(std::string name, std::string_view text);

/// A bundled fixture name ("mlperf-tiny", "dlmc") or a path to a CSV file.
BenchmarkFixture load_fixture(std::string_view name_or_path);

/// A bundled descriptor name ("cortex-m4-fp32", ...) or a path to a JSON file.
std::filesystem::path resolve_hardware(std::string_view name_or_path);

}  // namespace mema
