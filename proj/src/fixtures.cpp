#include "mema/fixtures.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "mema/error.hpp"

#ifndef MEMA_DATA_DIR
#define MEMA_DATA_DIR "data"
#endif

namespace mema {

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("MEMA_DATA_DIR"); env && *env) return env;
  return MEMA_DATA_DIR;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::int64_t parse_int(std::string_view field, std::size_t line_no) {
  field = trim(field);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw Error("fixture line " + std::to_string(line_no) + ": not an integer: '" +
                std::string(field) + "'");
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

BenchmarkFixture parse_fixture(std::string name, std::string_view text) {
  BenchmarkFixture fx{std::move(name), {}};
  std::set<std::int64_t> ids;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty() || line.starts_with("layer_id")) continue;

    std::int64_t fields[4];
    for (int f = 0; f < 4; ++f) {
      const auto comma = line.find(',');
      if ((comma == std::string_view::npos) != (f == 3))
        throw Error("fixture line " + std::to_string(line_no) + ": expected layer_id,M,K,N");
      fields[f] = parse_int(line.substr(0, comma), line_no);
      line = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1);
    }
    const LayerDims layer{fields[0], fields[1], fields[2], fields[3]};
    if (layer.M < 1 || layer.K < 1 || layer.N < 1)
      throw Error("fixture line " + std::to_string(line_no) + ": dimensions must be positive");
    if (!ids.insert(layer.layer_id).second)
      throw Error("fixture line " + std::to_string(line_no) + ": duplicate layer id " +
                  std::to_string(layer.layer_id));
    fx.layers.push_back(layer);
  }
  return fx;
}

BenchmarkFixture load_fixture(std::string_view name_or_path) {
  const std::filesystem::path direct(name_or_path);
  if (std::filesystem::is_regular_file(direct))
    return parse_fixture(direct.stem().string(), read_file(direct));
  const auto bundled = data_dir() / "fixtures" / (std::string(name_or_path) + ".csv");
  if (std::filesystem::is_regular_file(bundled))
    return parse_fixture(std::string(name_or_path), read_file(bundled));
  throw Error("unknown fixture: " + std::string(name_or_path));
}

std::filesystem::path resolve_hardware(std::string_view name_or_path) {
  const std::filesystem::path direct(name_or_path);
  if (std::filesystem::is_regular_file(direct)) return direct;
  const auto bundled = data_dir() / "hw" / (std::string(name_or_path) + ".json");
  if (std::filesystem::is_regular_file(bundled)) return bundled;
  throw Error("unknown hardware descriptor: " + std::string(name_or_path));
}

}  // namespace mema
