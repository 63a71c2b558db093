#include "mema/sim.hpp"

#include <json.hpp>
#include <sstream>
#include <vector>

namespace mema {

namespace {

class LocalMemory {
 public:
  explicit LocalMemory(std::int64_t capacity) : capacity_(capacity) {}

  void acquire(std::int64_t elems) {
    resident_ += elems;
    if (resident_ > capacity_)
      throw Error("simulated local memory exceeded: " + std::to_string(resident_) + " > " +
                  std::to_string(capacity_));
    peak_ = std::max(peak_, resident_);
  }
  void release(std::int64_t elems) { resident_ -= elems; }
  std::int64_t peak() const { return peak_; }

 private:
  std::int64_t capacity_;
  std::int64_t resident_ = 0;
  std::int64_t peak_ = 0;
};

struct TileRef {
  std::int64_t row = 0;
  std::int64_t col = 0;
  std::int64_t elems = 0;

  bool same_tile(const TileRef& o) const { return row == o.row && col == o.col; }
};

TileRef tile_of(Operand op, const BlockRange& b) {
  switch (op) {
    case Operand::A: return {b.i0, b.p0, b.rows * b.depth};
    case Operand::B: return {b.p0, b.j0, b.depth * b.cols};
    case Operand::C: return {b.i0, b.j0, b.rows * b.cols};
  }
  return {};
}

}  // namespace

SimReport simulate_schedule(const MMProblem& p, const Schedule& s, SimOptions opts) {
  validate(p);
  validate(s.tile);
  const TileShape& t = s.tile;
  const Operand stationary = s.stationary();

  SimReport r;
  LocalMemory mem(t.m * t.k + t.k * t.n + t.m * t.n);
  const std::int64_t c_tile_cols = ceil_div(p.N, t.n);
  std::vector<bool> c_touched(static_cast<std::size_t>(ceil_div(p.M, t.m) * c_tile_cols), false);

  auto fetch = [&](Operand op, const BlockRange& b, std::int64_t elems) {
    switch (op) {
      case Operand::A: r.loads_A += elems; break;
      case Operand::B: r.loads_B += elems; break;
      case Operand::C: {
        const auto idx = static_cast<std::size_t>((b.i0 / t.m) * c_tile_cols + b.j0 / t.n);
        const bool first = !c_touched[idx];
        c_touched[idx] = true;
        if (!(opts.c_zero && first)) r.loads_C += elems;
        break;
      }
    }
  };

  std::optional<TileRef> held;
  auto evict_held = [&] {
    if (!held) return;
    if (stationary == Operand::C) r.stores_C += held->elems;
    mem.release(held->elems);
    held.reset();
  };

  for_each_block(p, s, [&](const BlockRange& b) {
    ++r.blocks_executed;
    const TileRef wanted = tile_of(stationary, b);
    if (!held || !held->same_tile(wanted)) {
      evict_held();
      mem.acquire(wanted.elems);
      fetch(stationary, b, wanted.elems);
      held = wanted;
    }
    for (Operand op : {Operand::A, Operand::B, Operand::C}) {
      if (op == stationary) continue;
      const std::int64_t elems = tile_of(op, b).elems;
      mem.acquire(elems);
      fetch(op, b, elems);
    }
    // Block computed; streamed tiles leave local memory, partial C goes back.
    for (Operand op : {Operand::A, Operand::B, Operand::C}) {
      if (op == stationary) continue;
      const std::int64_t elems = tile_of(op, b).elems;
      if (op == Operand::C) r.stores_C += elems;
      mem.release(elems);
    }
  });
  evict_held();

  r.total_elems = r.loads_A + r.loads_B + r.loads_C + r.stores_C;
  r.peak_resident_elems = mem.peak();
  return r;
}

IOReport io_report_from_sim(const SimReport& r, const Schedule& s, std::int64_t element_bytes) {
  IOReport io;
  switch (s.stationary()) {
    case Operand::A: io.stationary_elems = r.loads_A; break;
    case Operand::B: io.stationary_elems = r.loads_B; break;
    case Operand::C: io.stationary_elems = r.loads_C + r.stores_C; break;
  }
  io.total_elems = r.total_elems;
  io.streaming_elems = r.total_elems - io.stationary_elems;
  io.total_bytes = r.total_elems * element_bytes;
  return io;
}

BestSchedule brute_force_best(const MMProblem& p, const TileShape& t, SimOptions opts) {
  std::optional<BestSchedule> best;
  for (InnerClass cls : kClassPriority) {
    for (LoopOrder order : kAllLoopOrders) {
      if (inner_class(order) != cls) continue;
      const Schedule s{order, t};
      SimReport r = simulate_schedule(p, s, opts);
      if (!best || r.total_elems < best->report.total_elems) best = BestSchedule{s, r};
    }
  }
  return *best;
}

StreamTimingReport check_streaming_hiding(const HardwareSpec& hw, const TileShape& t,
                                          std::int64_t row_len_n) {
  validate(hw);
  validate(t);
  if (row_len_n < 1) throw Error("row length must be >= 1");
  StreamTimingReport rep;
  const double n = static_cast<double>(row_len_n);
  rep.compute_time_per_row = static_cast<double>(t.k) * n / hw.peak_flops_per_core;
  rep.writeback_time_per_row = n / hw.ext_bandwidth_elems_per_s;
  rep.hidden = static_cast<double>(t.k) * hw.ext_bandwidth_elems_per_s >= hw.peak_flops_per_core;
  return rep;
}

double measure_cake_bw(std::int64_t p_cores, const CBBlock& block, const HardwareSpec& hw) {
  validate(hw);
  if (p_cores != block.p) throw Error("CB block was shaped for a different core count");
  if (block.m < 1 || block.k < 1 || block.n < 1 || block.p < 1)
    throw Error("CB block dimensions must be >= 1");
  if (block.footprint() > hw.local_memory_elems)
    throw Error("CB block does not fit in local memory");

  // The p x p grid of m x n sub-blocks of C is handed out p_cores at a time.
  // A row panel (m x k) or column panel (k x n) is read from external memory
  // the first time any core needs it; C stays on chip.
  const std::int64_t p = block.p;
  std::vector<bool> a_loaded(static_cast<std::size_t>(p), false);
  std::vector<bool> b_loaded(static_cast<std::size_t>(p), false);
  std::int64_t io = 0;
  std::int64_t rounds = 0;
  const std::int64_t sub_blocks = p * p;
  for (std::int64_t next = 0; next < sub_blocks; ++rounds) {
    for (std::int64_t core = 0; core < p_cores && next < sub_blocks; ++core, ++next) {
      const auto bi = static_cast<std::size_t>(next / p);
      const auto bj = static_cast<std::size_t>(next % p);
      if (!a_loaded[bi]) { a_loaded[bi] = true; io += block.m * block.k; }
      if (!b_loaded[bj]) { b_loaded[bj] = true; io += block.k * block.n; }
    }
  }
  // Each round takes m*k*n / f seconds, so IO / T = io * f / (rounds * mkn).
  return Fraction::reduced(io, rounds * block.m * block.k * block.n)
      .times(hw.peak_flops_per_core);
}

std::string to_json(const SimReport& r) {
  nlohmann::ordered_json j;
  j["loads_A"] = r.loads_A;
  j["loads_B"] = r.loads_B;
  j["loads_C"] = r.loads_C;
  j["stores_C"] = r.stores_C;
  j["total_elems"] = r.total_elems;
  j["blocks_executed"] = r.blocks_executed;
  j["peak_resident_elems"] = r.peak_resident_elems;
  if (r.checksum) j["checksum"] = *r.checksum;
  return j.dump(2);
}

std::string sim_csv_header() {
  return "M,K,N,order,m,k,n,loads_A,loads_B,loads_C,stores_C,total_elems,blocks_executed";
}

std::string to_csv_row(const MMProblem& p, const Schedule& s, const SimReport& r) {
  std::ostringstream os;
  os << p.M << ',' << p.K << ',' << p.N << ',' << to_string(s.order) << ',' << s.tile.m << ','
     << s.tile.k << ',' << s.tile.n << ',' << r.loads_A << ',' << r.loads_B << ',' << r.loads_C
     << ',' << r.stores_C << ',' << r.total_elems << ',' << r.blocks_executed;
  return os.str();
}

}  // namespace mema
