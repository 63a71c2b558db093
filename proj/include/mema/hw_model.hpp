#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace mema {

/// Target-device resources. Bandwidth is held in elements/second; byte rates
/// are converted when a descriptor is parsed.
struct HardwareSpec {
  std::string name;
  std::int64_t reuse_registers = 0;     // element slots usable for reuse
  std::int64_t local_memory_elems = 0;  // shared on-chip memory (LM)
  double ext_bandwidth_elems_per_s = 0.0;
  double peak_flops_per_core = 0.0;  // MACs/second, single core
  std::int64_t cores = 1;
  std::int64_t element_bytes = 4;

  bool operator==(const HardwareSpec&) const = default;
};

struct RooflinePoint {
  double arithmetic_intensity = 0.0;   // MACs per element of external IO
  double attainable_throughput = 0.0;  // MACs/second
};

enum class Bound { Compute, Bandwidth };

/// Throws mema::Error when a field is out of range.
void validate(const HardwareSpec& hw);

inline double total_peak(const HardwareSpec& hw) {
  return static_cast<double>(hw.cores) * hw.peak_flops_per_core;
}

/// Arithmetic intensity at which bandwidth-bound throughput meets peak.
double ridge_point(const HardwareSpec& hw);

/// Roofline evaluation; exactly the total peak for ai >= ridge_point(hw).
double attainable_throughput(const HardwareSpec& hw, double ai);

RooflinePoint roofline_point(const HardwareSpec& hw, double ai);

/// Intensity at or above the ridge is compute-bound.
Bound classify(const HardwareSpec& hw, double ai);
std::string_view to_string(Bound b);

// Descriptor files are JSON objects. Required keys: name, reuse_registers,
// local_memory_elems, peak_flops_per_core, cores, element_bytes, and exactly
// one of ext_bandwidth_elems_per_s / ext_bandwidth_bytes_per_s. Optional:
// notes (string), non_normative (bool). Any other key is rejected.
HardwareSpec parse_hardware_json(std::string_view text);
HardwareSpec load_hardware(const std::filesystem::path& path);
std::string to_json(const HardwareSpec& hw);

}  // namespace mema
