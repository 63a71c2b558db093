#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mema/hw_model.hpp"
#include "mema/io_model.hpp"
#include "mema/kernel_ir.hpp"

namespace mema {

inline constexpr std::string_view kDescriptorVersion = "v1";

/// Everything needed to reproduce a chosen schedule.
struct ScheduleDescriptor {
  std::string version{kDescriptorVersion};
  std::string hardware;
  MMProblem problem;
  Schedule schedule;
  IOReport io;
  std::optional<ClassTotals> per_class;  // absent for ragged problems
  bool c_zero = false;
  double predicted_throughput = 0.0;  // MACs/second from the roofline

  bool operator==(const ScheduleDescriptor&) const = default;
};

/// Predicted throughput uses the problem's arithmetic intensity MKN / IO.
ScheduleDescriptor emit_descriptor(const MMProblem& p, const Schedule& s, const IOReport& io,
                                   const HardwareSpec& hw,
                                   std::optional<ClassTotals> per_class = std::nullopt,
                                   bool c_zero = false);

/// Stable field order, two-space indent, trailing newline.
std::string to_json(const ScheduleDescriptor& d);
ScheduleDescriptor parse_descriptor(std::string_view text);

enum class ElementType { F32, Q15 };

/// "f32", "i16-q15-scalar" (alias "q15").
ElementType parse_element_type(std::string_view text);
std::string_view to_string(ElementType t);

/// mema_outer_<m>x1x<n>: the register microkernel is a rank-1 update.
std::string kernel_function_name(const Schedule& s);

/// Self-contained C99 translation unit implementing the blocked product
///   void mema_outer_<m>x1x<n>(size_t M, size_t K, size_t N,
///                             const T *A, const T *B, T *C);
/// with row-major operands. Q15 accumulation rounds to nearest and saturates
/// after every MAC.
std::string emit_kernel_source(const Schedule& s, ElementType type);

}  // namespace mema
