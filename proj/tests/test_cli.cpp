#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mema/cli.hpp"
#include "mema/emit.hpp"
#include "mema/error.hpp"
#include "mema/fixtures.hpp"
#include "mema/sim.hpp"

using namespace mema;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mema_test_" + name);
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = temp_path(name);
  std::ofstream(path) << text;
  return path.string();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& row) {
  std::vector<std::string> out;
  std::istringstream is(row);
  for (std::string cell; std::getline(is, cell, ',');) out.push_back(cell);
  return out;
}

}  // namespace

TEST_CASE("derive") {
  SUBCASE("cube selects K-first with the 5x5 tile") {
    const Result r = run_cli({"derive", "40", "40", "40", "--hw", "cortex-m4-fp32"});
    CHECK(r.code == 0);
    CHECK(r.out.find("tile: m=5 k=5 n=5") != std::string::npos);
    CHECK(r.out.find("K-first, stationary C") != std::string::npos);
    CHECK(r.out.find("total=28800") != std::string::npos);
  }
  SUBCASE("skewed problem selects M-first") {
    const Result plain = run_cli({"derive", "64", "5", "32", "--hw", "cortex-m4-fp32"});
    CHECK(plain.code != 0);
    CHECK(plain.err.find("requires divisible tiling") != std::string::npos);
    for (const char* mode : {"--pad", "--simulate"}) {
      const Result r = run_cli({"derive", "64", "5", "32", "--hw", "cortex-m4-fp32", mode});
      CHECK(r.code == 0);
      CHECK(r.out.find("M-first") != std::string::npos);
    }
    const Result div = run_cli({"derive", "65", "5", "35", "--hw", "cortex-m4-fp32"});
    CHECK(div.out.find("(M-first, stationary B)") != std::string::npos);
  }
  SUBCASE("minimal register budget gives unit tiles") {
    const std::string hw = write_temp("tiny.json", R"({"name":"tiny","reuse_registers":3,
      "local_memory_elems":3,"ext_bandwidth_elems_per_s":10,"peak_flops_per_core":10,
      "cores":1,"element_bytes":4})");
    const Result r = run_cli({"derive", "7", "3", "2", "--hw", hw, "--format", "json"});
    CHECK(r.code == 0);
    const ScheduleDescriptor d = parse_descriptor(r.out);
    CHECK(d.schedule.tile == TileShape{1, 1, 1});
  }
  SUBCASE("descriptor written with --out reproduces under simulation") {
    const std::string out = temp_path("derive.json").string();
    const Result r = run_cli({"derive", "80", "10", "40", "--hw", "cortex-m4-fp32", "--out", out});
    REQUIRE(r.code == 0);
    std::ifstream in(out);
    std::stringstream buf;
    buf << in.rdbuf();
    const ScheduleDescriptor d = parse_descriptor(buf.str());
    const SimReport sim = simulate_schedule(d.problem, d.schedule, {d.c_zero});
    CHECK(sim.total_elems == d.io.total_elems);
    CHECK(r.out.find("total=" + std::to_string(sim.total_elems)) != std::string::npos);
  }
  SUBCASE("c-zero and dtype") {
    const Result r = run_cli({"derive", "40", "40", "40", "--hw", "cortex-m4-fp32", "--c-zero",
                              "--dtype", "q15", "--format", "json"});
    REQUIRE(r.code == 0);
    const ScheduleDescriptor d = parse_descriptor(r.out);
    CHECK(d.io.total_elems == 28800 - 1600);
    CHECK(d.problem.element_bytes == 2);
    CHECK(d.c_zero);
  }
  SUBCASE("errors") {
    CHECK(run_cli({"derive", "4", "4", "4", "--hw", "/nonexistent.json"}).code != 0);
    const std::string bad = write_temp("bad.json", "{\"name\": 1}");
    CHECK(run_cli({"derive", "4", "4", "4", "--hw", bad}).code != 0);
    CHECK(run_cli({"derive", "4", "4", "4"}).code != 0);
    CHECK(run_cli({"derive", "4", "4"}).code != 0);
    CHECK(run_cli({}).code != 0);
  }
}

TEST_CASE("select and simulate") {
  const Result sel = run_cli({"select", "40", "5", "40", "--tile", "5", "5", "5"});
  CHECK(sel.code == 0);
  CHECK(sel.out.find("M-first: 5000") != std::string::npos);
  CHECK(sel.out.find("K-first: 6400") != std::string::npos);
  CHECK(sel.out.find("m_first_condition: true") != std::string::npos);

  const Result sim = run_cli({"simulate", "7", "9", "11", "--tile", "5", "5", "5", "--format", "csv"});
  CHECK(sim.code == 0);
  const auto rows = lines(sim.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == sim_csv_header());

  const Result one = run_cli({"simulate", "40", "5", "40", "--tile", "5", "5", "5", "--order", "M->N->K"});
  CHECK(one.out.find("total=6400") != std::string::npos);
}

TEST_CASE("sweep") {
  const std::string header = "layer_id,M,K,N,order,m,k,n,io_analytic,io_simulated,pred_throughput";
  SUBCASE("bundled fixtures") {
    const Result tiny = run_cli({"sweep", "mlperf-tiny", "--hw", "cortex-m4-fp32"});
    CHECK(tiny.code == 0);
    const auto rows = lines(tiny.out);
    REQUIRE(rows.size() == 21);
    CHECK(rows[0] == header);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto cells = split(rows[i]);
      REQUIRE(cells.size() == 11);
      CHECK(cells[0] == std::to_string(i));
      const MMProblem p{std::stoll(cells[1]), std::stoll(cells[2]), std::stoll(cells[3])};
      if (divisible(p, {5, 5, 5})) CHECK(cells[8] == cells[9]);
    }
    const Result dlmc = run_cli({"sweep", "dlmc", "--hw", "cortex-a72"});
    CHECK(dlmc.code == 0);
    CHECK(lines(dlmc.out).size() == 13);
  }
  SUBCASE("empty fixture") {
    const std::string path = write_temp("empty.csv", "# nothing here\nlayer_id,M,K,N\n");
    const Result r = run_cli({"sweep", path, "--hw", "cortex-m4-fp32"});
    CHECK(r.code == 0);
    CHECK(r.out == header + "\n");
  }
  SUBCASE("deterministic and ordered by layer id") {
    const std::string path = write_temp("shuffled.csv", "3,10,10,10\n1,20,5,40\n2,5,5,5\n");
    const Result a = run_cli({"sweep", path, "--hw", "cortex-m4-fp32"});
    const Result b = run_cli({"sweep", path, "--hw", "cortex-m4-fp32"});
    CHECK(a.out == b.out);
    const auto rows = lines(a.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[1].starts_with("1,"));
    CHECK(rows[3].starts_with("3,"));
  }
  CHECK(run_cli({"sweep", "no-such-fixture", "--hw", "cortex-m4-fp32"}).code != 0);
}

TEST_CASE("roofline") {
  const std::string balanced = write_temp("balanced.json", R"({"name":"balanced",
    "reuse_registers":36,"local_memory_elems":36,"ext_bandwidth_elems_per_s":100,
    "peak_flops_per_core":100,"cores":1,"element_bytes":4})");
  const Result above = run_cli({"roofline", "5", "5", "--hw", balanced});
  CHECK(above.code == 0);
  CHECK(above.out.find("arithmetic intensity: 2.5") != std::string::npos);
  CHECK(above.out.find("ridge point: 1 ") != std::string::npos);
  CHECK(above.out.find("classification: compute-bound") != std::string::npos);

  const Result boundary = run_cli({"roofline", "2", "2", "--hw", balanced});
  CHECK(boundary.out.find("classification: compute-bound") != std::string::npos);

  const std::string steep = write_temp("steep.json", R"({"name":"steep",
    "reuse_registers":36,"local_memory_elems":36,"ext_bandwidth_elems_per_s":1,
    "peak_flops_per_core":1000,"cores":1,"element_bytes":4})");
  const Result below = run_cli({"roofline", "1", "1", "--hw", steep, "--format", "json"});
  CHECK(below.out.find("\"classification\": \"bandwidth-bound\"") != std::string::npos);
}

TEST_CASE("emit") {
  const std::string kernel = temp_path("kernel.c").string();
  const std::string desc = temp_path("emit.json").string();
  const Result r = run_cli({"emit", "40", "40", "40", "--hw", "cortex-m4-fp32", "--kernel", kernel,
                            "--out", desc});
  CHECK(r.code == 0);
  CHECK(r.out.find("mema_outer_5x1x5") != std::string::npos);
  CHECK(std::filesystem::file_size(kernel) > 0);
  std::ifstream in(desc);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(parse_descriptor(buf.str()).io.total_elems == 28800);

  const Result forced = run_cli({"emit", "40", "40", "40", "--hw", "cortex-m4-fp32", "--order",
                                 "K->M->N", "--tile", "5", "1", "5", "--dtype", "i16-q15-scalar"});
  CHECK(forced.code == 0);
  CHECK(forced.out.find("schedule K->M->N") != std::string::npos);
  CHECK(forced.out.find("int16_t") != std::string::npos);
}

TEST_CASE("fixture parsing") {
  const BenchmarkFixture fx = parse_fixture("t", "# c\nlayer_id,M,K,N\n1, 2,3,4 # x\n\n2,5,6,7\n");
  REQUIRE(fx.layers.size() == 2);
  CHECK(fx.layers[0] == LayerDims{1, 2, 3, 4});
  CHECK_THROWS_AS(parse_fixture("t", "1,2,3,4\n1,5,6,7\n"), Error);
  CHECK_THROWS_AS(parse_fixture("t", "1,0,3,4\n"), Error);
  CHECK_THROWS_AS(parse_fixture("t", "1,2,3\n"), Error);
  CHECK_THROWS_AS(parse_fixture("t", "1,2,3,x\n"), Error);
  CHECK(load_fixture("mlperf-tiny").layers.size() == 20);
  CHECK(load_fixture("mlperf-tiny").layers.front() == LayerDims{1, 16, 27, 1024});
  CHECK(load_fixture("dlmc").layers.size() == 12);
  CHECK(load_fixture("dlmc").layers.back() == LayerDims{12, 2048, 512, 2048});
}
