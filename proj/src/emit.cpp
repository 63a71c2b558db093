#include "mema/emit.hpp"

#include <json.hpp>
#include <sstream>

#include "mema/error.hpp"

namespace mema {

KernelIR lower_schedule(const MMProblem& p, const Schedule& s) {
  validate(p);
  validate(s.tile);
  KernelIR ir{p, s, {}};
  auto tile_of = [&](Dim d) {
    switch (d) {
      case Dim::M: return s.tile.m;
      case Dim::K: return s.tile.k;
      case Dim::N: return s.tile.n;
    }
    return std::int64_t{0};
  };
  auto extent = [&](Dim d) {
    switch (d) {
      case Dim::M: return p.M;
      case Dim::K: return p.K;
      case Dim::N: return p.N;
    }
    return std::int64_t{0};
  };
  for (Dim d : loop_dims(s.order)) ir.loops.push_back({d, LoopLevel::Block, extent(d), tile_of(d)});
  // Rank-1 updates: depth outermost inside the block, then rows, then columns.
  for (Dim d : {Dim::K, Dim::M, Dim::N}) ir.loops.push_back({d, LoopLevel::Intra, tile_of(d), 1});
  return ir;
}

void validate(const KernelIR& ir) {
  validate(ir.problem);
  validate(ir.schedule.tile);
  if (ir.loops.size() != 6) throw Error("kernel IR must have exactly six loops");
  const auto order = loop_dims(ir.schedule.order);
  bool seen_intra[3] = {false, false, false};
  for (std::size_t i = 0; i < ir.loops.size(); ++i) {
    const Loop& l = ir.loops[i];
    const auto d = static_cast<std::size_t>(l.dim);
    if (i < 3) {
      if (l.level != LoopLevel::Block || l.dim != order[i])
        throw Error("kernel IR block loops do not follow the schedule order");
      const std::int64_t want_extent = l.dim == Dim::M ? ir.problem.M
                                       : l.dim == Dim::K ? ir.problem.K
                                                         : ir.problem.N;
      const std::int64_t want_step = l.dim == Dim::M ? ir.schedule.tile.m
                                     : l.dim == Dim::K ? ir.schedule.tile.k
                                                       : ir.schedule.tile.n;
      if (l.extent != want_extent || l.step != want_step)
        throw Error("kernel IR block loop bounds do not match the problem");
    } else {
      if (l.level != LoopLevel::Intra || seen_intra[d])
        throw Error("kernel IR needs one intra-block loop per dimension");
      seen_intra[d] = true;
      const std::int64_t want = l.dim == Dim::M ? ir.schedule.tile.m
                                : l.dim == Dim::K ? ir.schedule.tile.k
                                                  : ir.schedule.tile.n;
      if (l.extent != want || l.step != 1)
        throw Error("kernel IR intra-block loop bounds do not match the tile");
    }
  }
}

ScheduleDescriptor emit_descriptor(const MMProblem& p, const Schedule& s, const IOReport& io,
                                   const HardwareSpec& hw, std::optional<ClassTotals> per_class,
                                   bool c_zero) {
  validate(p);
  validate(s.tile);
  if (io.total_elems <= 0) throw Error("IO report must have a positive total");
  ScheduleDescriptor d;
  d.hardware = hw.name;
  d.problem = p;
  d.schedule = s;
  d.io = io;
  d.per_class = per_class;
  d.c_zero = c_zero;
  const double ai = static_cast<double>(p.macs()) / static_cast<double>(io.total_elems);
  d.predicted_throughput = attainable_throughput(hw, ai);
  return d;
}

namespace {

using nlohmann::ordered_json;

ordered_json class_json(const IOReport& r) {
  ordered_json j;
  j["streaming_elems"] = r.streaming_elems;
  j["stationary_elems"] = r.stationary_elems;
  j["total_elems"] = r.total_elems;
  return j;
}

IOReport class_from_json(const ordered_json& j, std::int64_t element_bytes) {
  IOReport r;
  r.streaming_elems = j.at("streaming_elems").get<std::int64_t>();
  r.stationary_elems = j.at("stationary_elems").get<std::int64_t>();
  r.total_elems = j.at("total_elems").get<std::int64_t>();
  r.total_bytes = r.total_elems * element_bytes;
  if (r.total_elems != r.streaming_elems + r.stationary_elems)
    throw Error("descriptor class totals are inconsistent");
  return r;
}

}  // namespace

std::string to_json(const ScheduleDescriptor& d) {
  ordered_json j;
  j["version"] = d.version;
  j["hardware"] = d.hardware;
  j["M"] = d.problem.M;
  j["K"] = d.problem.K;
  j["N"] = d.problem.N;
  j["element_bytes"] = d.problem.element_bytes;
  j["order"] = std::string(to_string(d.schedule.order));
  j["inner_class"] = std::string(to_string(d.schedule.inner()));
  j["stationary"] = std::string(to_string(d.schedule.stationary()));
  j["m"] = d.schedule.tile.m;
  j["k"] = d.schedule.tile.k;
  j["n"] = d.schedule.tile.n;
  j["streaming_elems"] = d.io.streaming_elems;
  j["stationary_elems"] = d.io.stationary_elems;
  j["total_io_elems"] = d.io.total_elems;
  j["total_io_bytes"] = d.io.total_bytes;
  if (d.per_class) {
    ordered_json pc;
    for (InnerClass cls : kClassPriority)
      pc[std::string(to_string(cls))] = class_json((*d.per_class)[cls]);
    j["per_class_totals"] = pc;
  } else {
    j["per_class_totals"] = nullptr;
  }
  j["c_zero"] = d.c_zero;
  j["predicted_throughput"] = d.predicted_throughput;
  return j.dump(2) + "\n";
}

ScheduleDescriptor parse_descriptor(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw Error(std::string("descriptor is not valid JSON: ") + e.what());
  }
  try {
    ScheduleDescriptor d;
    d.version = j.at("version").get<std::string>();
    if (d.version != kDescriptorVersion) throw Error("unsupported descriptor version: " + d.version);
    d.hardware = j.at("hardware").get<std::string>();
    d.problem = {j.at("M").get<std::int64_t>(), j.at("K").get<std::int64_t>(),
                 j.at("N").get<std::int64_t>(), j.at("element_bytes").get<std::int64_t>()};
    validate(d.problem);
    d.schedule.order = parse_loop_order(j.at("order").get<std::string>());
    d.schedule.tile = {j.at("m").get<std::int64_t>(), j.at("k").get<std::int64_t>(),
                       j.at("n").get<std::int64_t>()};
    validate(d.schedule.tile);
    if (j.at("inner_class").get<std::string>() != to_string(d.schedule.inner()) ||
        j.at("stationary").get<std::string>() != to_string(d.schedule.stationary()))
      throw Error("descriptor inner_class/stationary do not match the loop order");
    d.io.streaming_elems = j.at("streaming_elems").get<std::int64_t>();
    d.io.stationary_elems = j.at("stationary_elems").get<std::int64_t>();
    d.io.total_elems = j.at("total_io_elems").get<std::int64_t>();
    d.io.total_bytes = j.at("total_io_bytes").get<std::int64_t>();
    if (d.io.total_elems != d.io.streaming_elems + d.io.stationary_elems ||
        d.io.total_bytes != d.io.total_elems * d.problem.element_bytes)
      throw Error("descriptor IO fields are inconsistent");
    const auto& pc = j.at("per_class_totals");
    if (!pc.is_null()) {
      const std::int64_t eb = d.problem.element_bytes;
      d.per_class = ClassTotals{class_from_json(pc.at("K-first"), eb),
                                class_from_json(pc.at("M-first"), eb),
                                class_from_json(pc.at("N-first"), eb)};
    }
    d.c_zero = j.at("c_zero").get<bool>();
    d.predicted_throughput = j.at("predicted_throughput").get<double>();
    return d;
  } catch (const ordered_json::exception& e) {
    throw Error(std::string("malformed descriptor: ") + e.what());
  }
}

ElementType parse_element_type(std::string_view text) {
  if (text == "f32") return ElementType::F32;
  if (text == "i16-q15-scalar" || text == "q15") return ElementType::Q15;
  throw Error("unsupported element type: " + std::string(text));
}

std::string_view to_string(ElementType t) {
  return t == ElementType::F32 ? "f32" : "i16-q15-scalar";
}

std::string kernel_function_name(const Schedule& s) {
  return "mema_outer_" + std::to_string(s.tile.m) + "x1x" + std::to_string(s.tile.n);
}

namespace {

char lower(Dim d) {
  switch (d) {
    case Dim::M: return 'm';
    case Dim::K: return 'k';
    case Dim::N: return 'n';
  }
  return '?';
}

const char* extent_name(Dim d) {
  switch (d) {
    case Dim::M: return "M";
    case Dim::K: return "K";
    case Dim::N: return "N";
  }
  return "?";
}

const char* intra_var(Dim d) {
  switch (d) {
    case Dim::M: return "i";
    case Dim::K: return "p";
    case Dim::N: return "j";
  }
  return "?";
}

}  // namespace

std::string emit_kernel_source(const Schedule& s, ElementType type) {
  validate(s.tile);
  // Problem extents are runtime parameters; a unit problem only supplies the
  // loop structure.
  const KernelIR ir = lower_schedule({1, 1, 1}, s);
  const std::string name = kernel_function_name(s);
  const char* elem = type == ElementType::F32 ? "float" : "int16_t";

  std::ostringstream os;
  os << "/* Generated by mema. Do not edit.\n"
     << " * schedule " << to_string(s.order) << " (" << to_string(s.inner()) << ", stationary "
     << to_string(s.stationary()) << ")\n"
     << " * block " << s.tile.m << "x" << s.tile.k << "x" << s.tile.n << ", microkernel "
     << s.tile.m << "x1x" << s.tile.n << " outer product, element " << to_string(type) << "\n"
     << " * C (MxN) += A (MxK) * B (KxN), all row-major, packing-free.\n"
     << " */\n"
     << "#include <stddef.h>\n"
     << "#include <stdint.h>\n\n"
     << "static size_t mema_min(size_t a, size_t b) { return a < b ? a : b; }\n\n";
  if (type == ElementType::Q15) {
    os << "/* Q15 multiply-accumulate: round to nearest, saturate on overflow. */\n"
       << "static int16_t mema_q15_mac(int16_t c, int16_t a, int16_t b)\n"
       << "{\n"
       << "  const int32_t prod = (int32_t)a * (int32_t)b;\n"
       << "  int32_t sum = (int32_t)c + ((prod + (1 << 14)) >> 15);\n"
       << "  if (sum > 32767) sum = 32767;\n"
       << "  if (sum < -32768) sum = -32768;\n"
       << "  return (int16_t)sum;\n"
       << "}\n\n";
  }
  os << "void " << name << "(size_t M, size_t K, size_t N, const " << elem << " *A, const "
     << elem << " *B, " << elem << " *C)\n{\n";

  int depth = 1;
  auto indent = [&] { return std::string(static_cast<std::size_t>(2 * depth), ' '); };
  for (const Loop& l : ir.loops) {
    if (l.level == LoopLevel::Block) {
      const char c = lower(l.dim);
      os << indent() << "for (size_t b" << c << " = 0; b" << c << " < " << extent_name(l.dim)
         << "; b" << c << " += " << l.step << ") {\n";
      ++depth;
      continue;
    }
    if (l.dim == Dim::K) {
      // First intra loop: clamp the block at ragged edges.
      for (Dim d : {Dim::M, Dim::K, Dim::N}) {
        const char c = lower(d);
        const std::int64_t tile = d == Dim::M ? s.tile.m : d == Dim::K ? s.tile.k : s.tile.n;
        os << indent() << "const size_t len_" << c << " = mema_min(" << tile << ", "
           << extent_name(d) << " - b" << c << ");\n";
      }
    }
    const char* v = intra_var(l.dim);
    os << indent() << "for (size_t " << v << " = 0; " << v << " < len_" << lower(l.dim) << "; ++"
       << v << ") {\n";
    ++depth;
  }
  const std::string c_at = "C[(bm + i) * N + (bn + j)]";
  const std::string a_at = "A[(bm + i) * K + (bk + p)]";
  const std::string b_at = "B[(bk + p) * N + (bn + j)]";
  if (type == ElementType::F32)
    os << indent() << c_at << " += " << a_at << " * " << b_at << ";\n";
  else
    os << indent() << c_at << " = mema_q15_mac(" << c_at << ", " << a_at << ", " << b_at
       << ");\n";
  while (depth > 1) {
    --depth;
    os << indent() << "}\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace mema
