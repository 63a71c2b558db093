#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "mema/tiling.hpp"

namespace mema {

/// C (M x N) += A (M x K) * B (K x N).
struct MMProblem {
  std::int64_t M = 1;
  std::int64_t K = 1;
  std::int64_t N = 1;
  std::int64_t element_bytes = 4;

  std::int64_t macs() const { return M * K * N; }
  bool operator==(const MMProblem&) const = default;
};

void validate(const MMProblem& p);

enum class Dim { M, K, N };
enum class Operand { A, B, C };

/// Block loop orders, named outer -> middle -> inner.
enum class LoopOrder { MNK, NMK, MKN, NKM, KMN, KNM };

inline constexpr std::array<LoopOrder, 6> kAllLoopOrders = {
    LoopOrder::MNK, LoopOrder::NMK, LoopOrder::MKN,
    LoopOrder::NKM, LoopOrder::KMN, LoopOrder::KNM};

/// Schedules are grouped by their innermost block dimension.
enum class InnerClass { KFirst, MFirst, NFirst };

/// Selection tie-break priority.
inline constexpr std::array<InnerClass, 3> kClassPriority = {
    InnerClass::KFirst, InnerClass::MFirst, InnerClass::NFirst};

/// {outer, middle, inner}
std::array<Dim, 3> loop_dims(LoopOrder order);
InnerClass inner_class(LoopOrder order);
/// A for N-first, B for M-first, C for K-first.
Operand stationary_operand(InnerClass cls);
/// First order in kAllLoopOrders with the given inner dimension.
LoopOrder canonical_order(InnerClass cls);

std::string_view to_string(Dim d);
std::string_view to_string(Operand op);
std::string_view to_string(LoopOrder order);  // "M->N->K"
std::string_view to_string(InnerClass cls);   // "K-first"
/// Accepts "M->N->K", "MNK" or "mnk".
LoopOrder parse_loop_order(std::string_view text);

struct Schedule {
  LoopOrder order = LoopOrder::MNK;
  TileShape tile;

  InnerClass inner() const { return inner_class(order); }
  Operand stationary() const { return stationary_operand(inner()); }
  bool operator==(const Schedule&) const = default;
};

/// How C is initialised before accumulation. Default follows BLAS
/// (C = C + A*B); zero_init skips the first load of every C element.
struct IoOptions {
  bool c_zero = false;
};

struct IOReport {
  std::int64_t streaming_elems = 0;
  std::int64_t stationary_elems = 0;
  std::int64_t total_elems = 0;
  std::int64_t total_bytes = 0;

  bool operator==(const IOReport&) const = default;
};

bool divisible(const MMProblem& p, const TileShape& t);
/// Rounds every problem dimension up to a multiple of the tile.
MMProblem pad_to_tile(const MMProblem& p, const TileShape& t);

// Closed forms. All throw NonDivisibleError unless divisible(p, t).
IOReport io_n_first(const MMProblem& p, const TileShape& t, IoOptions opts = {});
IOReport io_m_first(const MMProblem& p, const TileShape& t, IoOptions opts = {});
IOReport io_k_first(const MMProblem& p, const TileShape& t, IoOptions opts = {});
IOReport io_for_class(const MMProblem& p, const TileShape& t, InnerClass cls,
                      IoOptions opts = {});

struct ClassTotals {
  IOReport k_first;
  IOReport m_first;
  IOReport n_first;

  const IOReport& operator[](InnerClass cls) const;
  bool operator==(const ClassTotals&) const = default;
};

/// The closed forms as real-valued expressions, e.g. MKN(1/m + 2/k) + MK for
/// N-first. No divisibility requirement; equals io_for_class(...).total_elems
/// whenever the tile divides the problem.
double io_closed_form(const MMProblem& p, const TileShape& t, InnerClass cls, IoOptions opts = {});

ClassTotals io_all_classes(const MMProblem& p, const TileShape& t, IoOptions opts = {});

/// Minimum-IO schedule; ties resolved K-first, then M-first, then N-first,
/// using the canonical order of the winning class.
Schedule select_schedule(const MMProblem& p, const TileShape& t, IoOptions opts = {});

/// Closed-form test for M-first being no worse than K-first and N-first:
///   K <= 2M / (1 + M(2/k - 1/m))  and  N <= M / (1 + M(1/n - 1/m)).
/// Evaluated in exact integer arithmetic. Throws DegenerateConditionError
/// when either denominator is non-positive.
bool m_first_condition(const MMProblem& p, const TileShape& t);

}  // namespace mema
