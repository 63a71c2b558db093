#include "mema/io_model.hpp"

#include <cctype>
#include <string>

#include "mema/error.hpp"

namespace mema {

void validate(const MMProblem& p) {
  if (p.M < 1 || p.K < 1 || p.N < 1) throw Error("problem dimensions must be >= 1");
  if (p.element_bytes < 1) throw Error("element_bytes must be >= 1");
}

std::array<Dim, 3> loop_dims(LoopOrder order) {
  switch (order) {
    case LoopOrder::MNK: return {Dim::M, Dim::N, Dim::K};
    case LoopOrder::NMK: return {Dim::N, Dim::M, Dim::K};
    case LoopOrder::MKN: return {Dim::M, Dim::K, Dim::N};
    case LoopOrder::NKM: return {Dim::N, Dim::K, Dim::M};
    case LoopOrder::KMN: return {Dim::K, Dim::M, Dim::N};
    case LoopOrder::KNM: return {Dim::K, Dim::N, Dim::M};
  }
  throw Error("invalid loop order");
}

InnerClass inner_class(LoopOrder order) {
  switch (loop_dims(order)[2]) {
    case Dim::M: return InnerClass::MFirst;
    case Dim::N: return InnerClass::NFirst;
    case Dim::K: return InnerClass::KFirst;
  }
  throw Error("invalid loop order");
}

Operand stationary_operand(InnerClass cls) {
  switch (cls) {
    case InnerClass::NFirst: return Operand::A;
    case InnerClass::MFirst: return Operand::B;
    case InnerClass::KFirst: return Operand::C;
  }
  throw Error("invalid inner class");
}

LoopOrder canonical_order(InnerClass cls) {
  for (LoopOrder o : kAllLoopOrders)
    if (inner_class(o) == cls) return o;
  throw Error("invalid inner class");
}

std::string_view to_string(Dim d) {
  switch (d) {
    case Dim::M: return "M";
    case Dim::K: return "K";
    case Dim::N: return "N";
  }
  return "?";
}

std::string_view to_string(Operand op) {
  switch (op) {
    case Operand::A: return "A";
    case Operand::B: return "B";
    case Operand::C: return "C";
  }
  return "?";
}

std::string_view to_string(LoopOrder order) {
  switch (order) {
    case LoopOrder::MNK: return "M->N->K";
    case LoopOrder::NMK: return "N->M->K";
    case LoopOrder::MKN: return "M->K->N";
    case LoopOrder::NKM: return "N->K->M";
    case LoopOrder::KMN: return "K->M->N";
    case LoopOrder::KNM: return "K->N->M";
  }
  return "?";
}

std::string_view to_string(InnerClass cls) {
  switch (cls) {
    case InnerClass::KFirst: return "K-first";
    case InnerClass::MFirst: return "M-first";
    case InnerClass::NFirst: return "N-first";
  }
  return "?";
}

LoopOrder parse_loop_order(std::string_view text) {
  std::string letters;
  for (char ch : text) {
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (up == 'M' || up == 'N' || up == 'K') letters.push_back(up);
    else if (ch != '-' && ch != '>' && ch != ' ')
      throw Error("invalid loop order: " + std::string(text));
  }
  for (LoopOrder o : kAllLoopOrders) {
    const auto d = loop_dims(o);
    std::string name;
    for (Dim x : d) name += to_string(x);
    if (name == letters) return o;
  }
  throw Error("invalid loop order: " + std::string(text));
}

bool divisible(const MMProblem& p, const TileShape& t) {
  return p.M % t.m == 0 && p.K % t.k == 0 && p.N % t.n == 0;
}

MMProblem pad_to_tile(const MMProblem& p, const TileShape& t) {
  validate(p);
  validate(t);
  auto up = [](std::int64_t x, std::int64_t s) { return (x + s - 1) / s * s; };
  return {up(p.M, t.m), up(p.K, t.k), up(p.N, t.n), p.element_bytes};
}

namespace {

void check_divisible(const MMProblem& p, const TileShape& t) {
  validate(p);
  validate(t);
  if (!divisible(p, t)) throw NonDivisibleError();
}

IOReport make_report(const MMProblem& p, std::int64_t streaming, std::int64_t stationary) {
  IOReport r;
  r.streaming_elems = streaming;
  r.stationary_elems = stationary;
  r.total_elems = streaming + stationary;
  r.total_bytes = r.total_elems * p.element_bytes;
  return r;
}

std::int64_t block_count(const MMProblem& p, const TileShape& t) {
  return (p.M / t.m) * (p.K / t.k) * (p.N / t.n);
}

}  // namespace

// Streamed C tiles are read and written once per block; with c_zero the
// reads of the first K-panel (MN elements in total) disappear.
IOReport io_n_first(const MMProblem& p, const TileShape& t, IoOptions opts) {
  check_divisible(p, t);
  std::int64_t streaming = block_count(p, t) * (2 * t.m * t.n + t.n * t.k);
  if (opts.c_zero) streaming -= p.M * p.N;
  return make_report(p, streaming, p.M * p.K);
}

IOReport io_m_first(const MMProblem& p, const TileShape& t, IoOptions opts) {
  check_divisible(p, t);
  std::int64_t streaming = block_count(p, t) * (t.m * t.k + 2 * t.m * t.n);
  if (opts.c_zero) streaming -= p.M * p.N;
  return make_report(p, streaming, p.K * p.N);
}

IOReport io_k_first(const MMProblem& p, const TileShape& t, IoOptions opts) {
  check_divisible(p, t);
  const std::int64_t streaming = block_count(p, t) * (t.m * t.k + t.k * t.n);
  // Stationary C: loaded once, stored once.
  const std::int64_t stationary = (opts.c_zero ? 1 : 2) * p.M * p.N;
  return make_report(p, streaming, stationary);
}

IOReport io_for_class(const MMProblem& p, const TileShape& t, InnerClass cls, IoOptions opts) {
  switch (cls) {
    case InnerClass::KFirst: return io_k_first(p, t, opts);
    case InnerClass::MFirst: return io_m_first(p, t, opts);
    case InnerClass::NFirst: return io_n_first(p, t, opts);
  }
  throw Error("invalid inner class");
}

double io_closed_form(const MMProblem& p, const TileShape& t, InnerClass cls, IoOptions opts) {
  validate(p);
  validate(t);
  const double macs = static_cast<double>(p.macs());
  const double M = static_cast<double>(p.M), K = static_cast<double>(p.K),
               N = static_cast<double>(p.N);
  const double m = static_cast<double>(t.m), k = static_cast<double>(t.k),
               n = static_cast<double>(t.n);
  const double c_reads_saved = opts.c_zero ? M * N : 0.0;
  switch (cls) {
    case InnerClass::NFirst: return macs * (1.0 / m + 2.0 / k) + M * K - c_reads_saved;
    case InnerClass::MFirst: return macs * (2.0 / k + 1.0 / n) + K * N - c_reads_saved;
    case InnerClass::KFirst: return macs * (1.0 / m + 1.0 / n) + 2.0 * M * N - c_reads_saved;
  }
  throw Error("invalid inner class");
}

const IOReport& ClassTotals::operator[](InnerClass cls) const {
  switch (cls) {
    case InnerClass::KFirst: return k_first;
    case InnerClass::MFirst: return m_first;
    case InnerClass::NFirst: return n_first;
  }
  throw Error("invalid inner class");
}

ClassTotals io_all_classes(const MMProblem& p, const TileShape& t, IoOptions opts) {
  return {io_k_first(p, t, opts), io_m_first(p, t, opts), io_n_first(p, t, opts)};
}

Schedule select_schedule(const MMProblem& p, const TileShape& t, IoOptions opts) {
  const ClassTotals totals = io_all_classes(p, t, opts);
  InnerClass best = kClassPriority[0];
  for (InnerClass cls : kClassPriority) {
    if (totals[cls].total_elems < totals[best].total_elems) best = cls;
  }
  return {canonical_order(best), t};
}

bool m_first_condition(const MMProblem& p, const TileShape& t) {
  validate(p);
  validate(t);
  const auto [M, K, N, bytes] = p;
  const auto [m, k, n] = t;
  // K (mk + M(2m - k)) <= 2Mmk  <=>  K <= 2M / (1 + M(2/k - 1/m))
  const std::int64_t den_k = m * k + M * (2 * m - k);
  // N (mn + M(m - n)) <= Mmn    <=>  N <= M / (1 + M(1/n - 1/m))
  const std::int64_t den_n = m * n + M * (m - n);
  if (den_k <= 0 || den_n <= 0) throw DegenerateConditionError();
  return K * den_k <= 2 * M * m * k && N * den_n <= M * m * n;
}

}  // namespace mema
