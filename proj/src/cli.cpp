#include "mema/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "mema/emit.hpp"
#include "mema/error.hpp"
#include "mema/fixtures.hpp"
#include "mema/hw_model.hpp"
#include "mema/io_model.hpp"
#include "mema/sim.hpp"
#include "mema/tiling.hpp"

namespace mema::cli {

namespace {

struct GlobalOptions {
  std::string hw;
  std::string out;
  std::string format = "text";
  std::string dtype;
  bool pad = false;
  bool c_zero = false;
  bool simulate = false;
};

/// The schedule a command settled on together with the IO it will incur.
struct Plan {
  MMProblem problem;  // padded when --pad was applied
  std::optional<MMProblem> padded_from;
  Schedule schedule;
  IOReport io;
  std::optional<ClassTotals> per_class;
  bool simulated = false;
};

HardwareSpec load_hw(const GlobalOptions& g) {
  if (g.hw.empty()) throw Error("--hw is required for this command");
  return load_hardware(resolve_hardware(g.hw));
}

std::int64_t element_bytes_for(const GlobalOptions& g, const std::optional<HardwareSpec>& hw) {
  if (!g.dtype.empty()) return parse_element_type(g.dtype) == ElementType::F32 ? 4 : 2;
  return hw ? hw->element_bytes : 4;
}

TileShape block_tile(const HardwareSpec& hw) {
  const std::int64_t t = derive_square_tile(hw.reuse_registers);
  return {t, t, t};
}

TileShape tile_from(const std::vector<std::int64_t>& v) {
  if (v.size() != 3) throw Error("--tile takes three values: m k n");
  TileShape t{v[0], v[1], v[2]};
  validate(t);
  return t;
}

Plan make_plan(const MMProblem& problem, const TileShape& tile, const GlobalOptions& g,
               std::optional<LoopOrder> forced = std::nullopt) {
  validate(problem);
  validate(tile);
  const IoOptions io_opts{g.c_zero};
  Plan plan;
  plan.problem = problem;
  if (g.simulate) {
    plan.simulated = true;
    if (divisible(problem, tile)) plan.per_class = io_all_classes(problem, tile, io_opts);
    if (forced) {
      plan.schedule = {*forced, tile};
      const SimReport r = simulate_schedule(problem, plan.schedule, {g.c_zero});
      plan.io = io_report_from_sim(r, plan.schedule, problem.element_bytes);
    } else {
      const BestSchedule best = brute_force_best(problem, tile, {g.c_zero});
      plan.schedule = best.schedule;
      plan.io = io_report_from_sim(best.report, best.schedule, problem.element_bytes);
    }
    return plan;
  }
  if (!divisible(problem, tile)) {
    if (!g.pad)
      throw Error("requires divisible tiling (" + std::to_string(problem.M) + "x" +
                  std::to_string(problem.K) + "x" + std::to_string(problem.N) + " by tile " +
                  std::to_string(tile.m) + "x" + std::to_string(tile.k) + "x" +
                  std::to_string(tile.n) + "); use --pad or --simulate");
    plan.padded_from = problem;
    plan.problem = pad_to_tile(problem, tile);
  }
  plan.per_class = io_all_classes(plan.problem, tile, io_opts);
  plan.schedule = forced ? Schedule{*forced, tile} : select_schedule(plan.problem, tile, io_opts);
  plan.io = (*plan.per_class)[plan.schedule.inner()];
  return plan;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

void print_plan_text(std::ostream& out, const Plan& plan, const ScheduleDescriptor& d) {
  const auto& p = plan.problem;
  const auto& t = plan.schedule.tile;
  out << "hardware: " << d.hardware << "\n";
  out << "problem: M=" << p.M << " K=" << p.K << " N=" << p.N;
  if (plan.padded_from)
    out << " (padded from " << plan.padded_from->M << "x" << plan.padded_from->K << "x"
        << plan.padded_from->N << ")";
  out << "\n";
  out << "tile: m=" << t.m << " k=" << t.k << " n=" << t.n << "\n";
  out << "schedule: " << to_string(plan.schedule.order) << " (" << to_string(plan.schedule.inner())
      << ", stationary " << to_string(plan.schedule.stationary()) << ")\n";
  if (plan.per_class) {
    out << "io by class (elements):";
    for (InnerClass cls : kClassPriority)
      out << " " << to_string(cls) << "=" << (*plan.per_class)[cls].total_elems;
    out << "\n";
  }
  out << "io" << (plan.simulated ? " (simulated)" : "") << ": streaming=" << plan.io.streaming_elems
      << " stationary=" << plan.io.stationary_elems << " total=" << plan.io.total_elems
      << " elements (" << plan.io.total_bytes << " bytes)\n";
  out << "predicted throughput: " << d.predicted_throughput << " MACs/s\n";
}

std::string plan_csv(const Plan& plan, const ScheduleDescriptor& d) {
  std::ostringstream os;
  os << "M,K,N,order,m,k,n,total_io_elems,predicted_throughput\n"
     << plan.problem.M << ',' << plan.problem.K << ',' << plan.problem.N << ','
     << to_string(plan.schedule.order) << ',' << plan.schedule.tile.m << ','
     << plan.schedule.tile.k << ',' << plan.schedule.tile.n << ',' << plan.io.total_elems << ','
     << std::setprecision(10) << d.predicted_throughput << "\n";
  return os.str();
}

void render_plan(std::ostream& out, const Plan& plan, const ScheduleDescriptor& d,
                 const GlobalOptions& g) {
  if (g.format == "json") out << to_json(d);
  else if (g.format == "csv") out << plan_csv(plan, d);
  else print_plan_text(out, plan, d);
}

int cmd_derive(const GlobalOptions& g, const MMProblem& dims, std::ostream& out) {
  const HardwareSpec hw = load_hw(g);
  MMProblem problem = dims;
  problem.element_bytes = element_bytes_for(g, hw);
  const Plan plan = make_plan(problem, block_tile(hw), g);
  const ScheduleDescriptor d =
      emit_descriptor(plan.problem, plan.schedule, plan.io, hw, plan.per_class, g.c_zero);
  render_plan(out, plan, d, g);
  if (hw.cores > 1) {
    const CBBlock cb = derive_cake_block(hw.cores, hw.local_memory_elems);
    if (g.format == "text")
      out << "cb block: p=" << cb.p << " sub-block " << cb.m << "x" << cb.k << "x" << cb.n
          << " block " << cb.block_m() << "x" << cb.k << "x" << cb.block_n()
          << " offchip bw " << cake_offchip_bw(cb.m, cb.n, hw.peak_flops_per_core)
          << " elems/s\n";
  }
  if (!g.out.empty()) write_file(g.out, to_json(d));
  return 0;
}

int cmd_select(const GlobalOptions& g, const MMProblem& dims, const std::vector<std::int64_t>& tile_v,
               std::ostream& out) {
  std::optional<HardwareSpec> hw;
  if (!g.hw.empty()) hw = load_hw(g);
  MMProblem problem = dims;
  problem.element_bytes = element_bytes_for(g, hw);
  TileShape tile;
  if (!tile_v.empty()) tile = tile_from(tile_v);
  else if (hw) tile = block_tile(*hw);
  else throw Error("select needs --tile or --hw");
  const Plan plan = make_plan(problem, tile, g);

  bool m_first = false;
  std::string condition;
  try {
    m_first = m_first_condition(plan.problem, tile);
    condition = m_first ? "true" : "false";
  } catch (const DegenerateConditionError& e) {
    condition = e.what();
  }

  if (g.format == "json") {
    nlohmann::ordered_json j;
    j["order"] = std::string(to_string(plan.schedule.order));
    j["inner_class"] = std::string(to_string(plan.schedule.inner()));
    j["stationary"] = std::string(to_string(plan.schedule.stationary()));
    j["m"] = tile.m;
    j["k"] = tile.k;
    j["n"] = tile.n;
    j["total_io_elems"] = plan.io.total_elems;
    if (plan.per_class) {
      nlohmann::ordered_json pc;
      for (InnerClass cls : kClassPriority)
        pc[std::string(to_string(cls))] = (*plan.per_class)[cls].total_elems;
      j["per_class_totals"] = pc;
    }
    j["m_first_condition"] = condition;
    out << j.dump(2) << "\n";
  } else {
    out << "schedule: " << to_string(plan.schedule.order) << " ("
        << to_string(plan.schedule.inner()) << ", stationary "
        << to_string(plan.schedule.stationary()) << ")\n";
    if (plan.per_class)
      for (InnerClass cls : kClassPriority)
        out << to_string(cls) << ": " << (*plan.per_class)[cls].total_elems << "\n";
    out << "total: " << plan.io.total_elems << "\n";
    out << "m_first_condition: " << condition << "\n";
  }
  return 0;
}

int cmd_simulate(const GlobalOptions& g, const MMProblem& dims,
                 const std::vector<std::int64_t>& tile_v, const std::string& order_arg,
                 std::ostream& out) {
  std::optional<HardwareSpec> hw;
  if (!g.hw.empty()) hw = load_hw(g);
  MMProblem problem = dims;
  problem.element_bytes = element_bytes_for(g, hw);
  validate(problem);
  TileShape tile;
  if (!tile_v.empty()) tile = tile_from(tile_v);
  else if (hw) tile = block_tile(*hw);
  else throw Error("simulate needs --tile or --hw");

  std::vector<LoopOrder> orders;
  if (order_arg == "all") orders.assign(kAllLoopOrders.begin(), kAllLoopOrders.end());
  else orders.push_back(parse_loop_order(order_arg));

  std::ostringstream body;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  if (g.format == "csv") body << sim_csv_header() << "\n";
  for (LoopOrder o : orders) {
    const Schedule s{o, tile};
    const SimReport r = simulate_schedule(problem, s, {g.c_zero});
    if (g.format == "csv") {
      body << to_csv_row(problem, s, r) << "\n";
    } else if (g.format == "json") {
      auto j = nlohmann::ordered_json::parse(to_json(r));
      j["order"] = std::string(to_string(o));
      runs.push_back(j);
    } else {
      body << to_string(o) << " (" << to_string(s.inner()) << "): A=" << r.loads_A
           << " B=" << r.loads_B << " C_loads=" << r.loads_C << " C_stores=" << r.stores_C
           << " total=" << r.total_elems << " blocks=" << r.blocks_executed << "\n";
    }
  }
  if (g.format == "json") body << runs.dump(2) << "\n";
  if (!g.out.empty()) write_file(g.out, body.str());
  else out << body.str();
  return 0;
}

int cmd_sweep(const GlobalOptions& g, const std::string& fixture_name, std::ostream& out) {
  const HardwareSpec hw = load_hw(g);
  const BenchmarkFixture fx = load_fixture(fixture_name);
  const TileShape tile = block_tile(hw);
  const IoOptions io_opts{g.c_zero};
  const std::int64_t bytes = element_bytes_for(g, hw);

  std::ostringstream csv;
  csv << "layer_id,M,K,N,order,m,k,n,io_analytic,io_simulated,pred_throughput\n";
  auto layers = fx.layers;
  std::sort(layers.begin(), layers.end(),
            [](const LayerDims& a, const LayerDims& b) { return a.layer_id < b.layer_id; });
  for (const LayerDims& layer : layers) {
    const MMProblem problem{layer.M, layer.K, layer.N, bytes};
    // Analytic IO is evaluated on the tile-padded problem; it equals the
    // unpadded problem whenever the tile divides it.
    const MMProblem padded = pad_to_tile(problem, tile);
    Schedule s = select_schedule(padded, tile, io_opts);
    if (g.simulate && !divisible(problem, tile))
      s = brute_force_best(problem, tile, {g.c_zero}).schedule;
    const std::int64_t analytic = io_for_class(padded, tile, s.inner(), io_opts).total_elems;
    const SimReport r = simulate_schedule(problem, s, {g.c_zero});
    const double ai = static_cast<double>(problem.macs()) / static_cast<double>(r.total_elems);
    csv << layer.layer_id << ',' << layer.M << ',' << layer.K << ',' << layer.N << ','
        << to_string(s.order) << ',' << tile.m << ',' << tile.k << ',' << tile.n << ','
        << analytic << ',' << r.total_elems << ',' << std::setprecision(10)
        << attainable_throughput(hw, ai) << "\n";
  }
  if (!g.out.empty()) write_file(g.out, csv.str());
  else out << csv.str();
  return 0;
}

int cmd_roofline(const GlobalOptions& g, std::int64_t m, std::int64_t n, std::ostream& out) {
  const HardwareSpec hw = load_hw(g);
  const double ai = arithmetic_intensity_of_tile(m, n);
  const double ridge = ridge_point(hw);
  const Bound bound = classify(hw, ai);
  const double tput = attainable_throughput(hw, ai);
  if (g.format == "json") {
    nlohmann::ordered_json j;
    j["hardware"] = hw.name;
    j["m"] = m;
    j["n"] = n;
    j["arithmetic_intensity"] = ai;
    j["ridge_point"] = ridge;
    j["classification"] = std::string(to_string(bound));
    j["attainable_throughput"] = tput;
    out << j.dump(2) << "\n";
  } else {
    out << "hardware: " << hw.name << "\n"
        << "tile: " << m << "x" << n << "\n"
        << "arithmetic intensity: " << ai << " MACs/element\n"
        << "ridge point: " << ridge << " MACs/element\n"
        << "classification: " << to_string(bound) << "\n"
        << "attainable throughput: " << tput << " MACs/s\n";
  }
  return 0;
}

int cmd_emit(const GlobalOptions& g, const MMProblem& dims, const std::vector<std::int64_t>& tile_v,
             const std::string& order_arg, const std::string& kernel_path, std::ostream& out) {
  const HardwareSpec hw = load_hw(g);
  MMProblem problem = dims;
  problem.element_bytes = element_bytes_for(g, hw);
  const TileShape tile = tile_v.empty() ? block_tile(hw) : tile_from(tile_v);
  std::optional<LoopOrder> forced;
  if (!order_arg.empty()) forced = parse_loop_order(order_arg);
  const Plan plan = make_plan(problem, tile, g, forced);
  const ScheduleDescriptor d =
      emit_descriptor(plan.problem, plan.schedule, plan.io, hw, plan.per_class, g.c_zero);
  const ElementType type = parse_element_type(g.dtype.empty() ? "f32" : g.dtype);
  const std::string source = emit_kernel_source(plan.schedule, type);
  if (!g.out.empty()) write_file(g.out, to_json(d));
  if (!kernel_path.empty()) {
    write_file(kernel_path, source);
    out << "wrote " << kernel_function_name(plan.schedule) << " ("
        << to_string(plan.schedule.order) << ") to " << kernel_path << "\n";
  } else {
    out << source;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"mema: IO-minimizing matrix multiplication scheduler"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--hw", g.hw, "Hardware descriptor (bundled name or JSON path)");
  app.add_option("--out", g.out, "Write the command's artifact to this file");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--dtype", g.dtype, "Element type: f32 or i16-q15-scalar")
      ->check(CLI::IsMember({"f32", "i16-q15-scalar", "q15"}));
  app.add_flag("--pad", g.pad, "Round dimensions up to tile multiples");
  app.add_flag("--c-zero", g.c_zero, "C starts as zero; skip its initial loads");
  app.add_flag("--simulate", g.simulate, "Count IO with the simulator (ragged tiles allowed)");

  MMProblem dims;
  std::vector<std::int64_t> tile_v;
  std::string order_arg = "all";
  std::string emit_order;
  std::string kernel_path;
  std::string fixture;
  std::int64_t rm = 0, rn = 0;

  auto add_dims = [&](CLI::App* sub) {
    sub->add_option("M", dims.M)->required();
    sub->add_option("K", dims.K)->required();
    sub->add_option("N", dims.N)->required();
    sub->fallthrough();
  };
  auto* derive = app.add_subcommand("derive", "Derive tile and IO-minimizing schedule");
  add_dims(derive);
  auto* select = app.add_subcommand("select", "Compare loop-order classes for a tile");
  add_dims(select);
  select->add_option("--tile", tile_v, "m k n")->expected(3);
  auto* simulate = app.add_subcommand("simulate", "Count external accesses by simulation");
  add_dims(simulate);
  simulate->add_option("--tile", tile_v, "m k n")->expected(3);
  simulate->add_option("--order", order_arg, "Loop order, e.g. K->M->N, or 'all'");
  auto* sweep = app.add_subcommand("sweep", "Per-layer CSV for a benchmark fixture");
  sweep->add_option("fixture", fixture, "Fixture name or CSV path")->required();
  sweep->fallthrough();
  auto* roofline = app.add_subcommand("roofline", "Roofline classification of an m x n tile");
  roofline->add_option("m", rm)->required();
  roofline->add_option("n", rn)->required();
  roofline->fallthrough();
  auto* emit = app.add_subcommand("emit", "Emit schedule descriptor and kernel source");
  add_dims(emit);
  emit->add_option("--tile", tile_v, "m k n")->expected(3);
  emit->add_option("--order", emit_order, "Force a loop order");
  emit->add_option("--kernel", kernel_path, "Write kernel source to this file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (*derive) return cmd_derive(g, dims, out);
    if (*select) return cmd_select(g, dims, tile_v, out);
    if (*simulate) return cmd_simulate(g, dims, tile_v, order_arg, out);
    if (*sweep) return cmd_sweep(g, fixture, out);
    if (*roofline) return cmd_roofline(g, rm, rn, out);
    if (*emit) return cmd_emit(g, dims, tile_v, emit_order, kernel_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace mema::cli
