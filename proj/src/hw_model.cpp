#include "mema/hw_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mema/error.hpp"

namespace mema {

void validate(const HardwareSpec& hw) {
  if (hw.reuse_registers < 3)
    throw Error("reuse_registers must be >= 3 (a 1x1x1 outer product needs 3)");
  if (hw.local_memory_elems <= 0) throw Error("local_memory_elems must be positive");
  if (!(hw.ext_bandwidth_elems_per_s > 0.0) || !std::isfinite(hw.ext_bandwidth_elems_per_s))
    throw Error("external bandwidth must be positive");
  if (!(hw.peak_flops_per_core > 0.0) || !std::isfinite(hw.peak_flops_per_core))
    throw Error("peak_flops_per_core must be positive");
  if (hw.cores < 1) throw Error("cores must be >= 1");
  if (hw.element_bytes <= 0) throw Error("element_bytes must be positive");
}

double ridge_point(const HardwareSpec& hw) {
  validate(hw);
  return total_peak(hw) / hw.ext_bandwidth_elems_per_s;
}

double attainable_throughput(const HardwareSpec& hw, double ai) {
  if (!(ai >= 0.0)) throw Error("arithmetic intensity must be non-negative");
  if (ai >= ridge_point(hw)) return total_peak(hw);
  return std::min(total_peak(hw), ai * hw.ext_bandwidth_elems_per_s);
}

RooflinePoint roofline_point(const HardwareSpec& hw, double ai) {
  return {ai, attainable_throughput(hw, ai)};
}

Bound classify(const HardwareSpec& hw, double ai) {
  return ai >= ridge_point(hw) ? Bound::Compute : Bound::Bandwidth;
}

std::string_view to_string(Bound b) {
  return b == Bound::Compute ? "compute-bound" : "bandwidth-bound";
}

namespace {

using nlohmann::json;

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("hardware descriptor missing key: ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(std::string("hardware descriptor key has wrong type: ") + key);
  }
}

}  // namespace

HardwareSpec parse_hardware_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("hardware descriptor is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("hardware descriptor must be a JSON object");

  static constexpr std::string_view kKnown[] = {
      "name",          "reuse_registers",           "local_memory_elems",
      "cores",         "peak_flops_per_core",       "element_bytes",
      "notes",         "ext_bandwidth_elems_per_s", "ext_bandwidth_bytes_per_s",
      "non_normative"};
  for (const auto& item : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), item.key()) == std::end(kKnown))
      throw Error("unknown hardware descriptor key: " + item.key());
  }

  HardwareSpec hw;
  hw.name = require<std::string>(j, "name");
  hw.reuse_registers = require<std::int64_t>(j, "reuse_registers");
  hw.local_memory_elems = require<std::int64_t>(j, "local_memory_elems");
  hw.peak_flops_per_core = require<double>(j, "peak_flops_per_core");
  hw.cores = require<std::int64_t>(j, "cores");
  hw.element_bytes = require<std::int64_t>(j, "element_bytes");
  if (hw.element_bytes <= 0) throw Error("element_bytes must be positive");

  const bool has_elems = j.contains("ext_bandwidth_elems_per_s");
  const bool has_bytes = j.contains("ext_bandwidth_bytes_per_s");
  if (has_elems == has_bytes)
    throw Error(
        "hardware descriptor needs exactly one of ext_bandwidth_elems_per_s, "
        "ext_bandwidth_bytes_per_s");
  hw.ext_bandwidth_elems_per_s =
      has_elems ? require<double>(j, "ext_bandwidth_elems_per_s")
                : require<double>(j, "ext_bandwidth_bytes_per_s") /
                      static_cast<double>(hw.element_bytes);
  if (j.contains("notes")) (void)require<std::string>(j, "notes");
  if (j.contains("non_normative")) (void)require<bool>(j, "non_normative");

  validate(hw);
  return hw;
}

HardwareSpec load_hardware(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open hardware descriptor: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_hardware_json(buf.str());
}

std::string to_json(const HardwareSpec& hw) {
  nlohmann::ordered_json j;
  j["name"] = hw.name;
  j["reuse_registers"] = hw.reuse_registers;
  j["local_memory_elems"] = hw.local_memory_elems;
  j["ext_bandwidth_elems_per_s"] = hw.ext_bandwidth_elems_per_s;
  j["peak_flops_per_core"] = hw.peak_flops_per_core;
  j["cores"] = hw.cores;
  j["element_bytes"] = hw.element_bytes;
  return j.dump(2) + "\n";
}

}  // namespace mema
