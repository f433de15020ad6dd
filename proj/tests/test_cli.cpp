#include "catch_amalgamated.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <set>
#include <unistd.h>
#include <fstream>
#include <sstream>

#include "../tools/cli.hpp"

using namespace rdmft::cli;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find("\r\n", pos);
    REQUIRE(end != std::string::npos);
    rows.push_back(text.substr(pos, end - pos));
    pos = end + 2;
  }
  return rows;
}

std::vector<std::string> fields(const std::string& row) {
  std::vector<std::string> f;
  std::stringstream ss(row);
  std::string item;
  while (std::getline(ss, item, ',')) f.push_back(item);
  if (!row.empty() && row.back() == ',') f.emplace_back();
  return f;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rdmft_cli_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(call({}).code == kUsage);
  CHECK(call({"no-such-command"}).code == kUsage);
  CHECK(call({"vrep-map", "--bogus"}).code == kUsage);
  CHECK(call({"vrep-map", "--grid", "1x1"}).code == kUsage);
  CHECK(call({"vrep-map", "--grid", "abc"}).code == kUsage);
  CHECK(call({"vrep-map", "--format", "xml"}).code == kUsage);
  CHECK(call({"vrep-map", "--n", "0"}).code == kUsage);
  CHECK(call({"vrep-map", "--d-min", "0.4", "--d-max", "0.2"}).code == kUsage);
  CHECK(call({"energy-min", "--u", "-1"}).code == kUsage);
  CHECK(call({"functional-grid", "--n", "3", "--functional", "analytic", "--grid", "3x3"}).code == kUsage);
  CHECK(call({"bogoliubov", "--sweep", "sideways"}).code == kUsage);
  CHECK(call({"--help"}).code == kSuccess);
}

TEST_CASE("grid parsing and number formatting") {
  CHECK(parse_grid("50x40") == std::pair{50, 40});
  CHECK_THROWS(parse_grid("50x1"));
  CHECK_THROWS(parse_grid("50"));
  CHECK_THROWS(parse_grid("x50"));
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-1000) == "-1000");
  CHECK(std::strtod(format_double(1.0 / 3).c_str(), nullptr) == 1.0 / 3);
  std::ostringstream os;
  CsvWriter w(os);
  w.row({"a", "b,c", "say \"hi\""});
  CHECK(os.str() == "a,\"b,c\",\"say \"\"hi\"\"\"\r\n");
}

TEST_CASE("CSV output is RFC 4180 with 17 significant digits") {
  const auto r = call({"vrep-map", "--n", "3", "--grid", "4x6"});
  REQUIRE(r.code == kSuccess);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 1 + 4 * 6 + 1);  // the center closes the grid when d_max = 1/2
  CHECK(rows[0] == "gamma_ll,gamma_lr,d,phi,class_code,class,level");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    REQUIRE(f.size() == 7);
    for (int k = 0; k < 4; ++k) {
      const double v = std::strtod(f[k].c_str(), nullptr);
      CHECK(f[k] == format_double(v));
    }
  }
}

TEST_CASE("CSV output is byte-identical across runs and worker counts") {
  const std::vector<std::string> base{"functional-grid", "--n", "3", "--grid", "4x5", "--functional", "all",
                                      "--d-min", "0.01"};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return call(a);
  };
  const auto a = with({"--workers", "1"});
  const auto b = with({"--workers", "1"});
  const auto c = with({"--workers", "3"});
  REQUIRE(a.code == kSuccess);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  const auto other_seed = with({"--workers", "1", "--seed", "7"});
  REQUIRE(other_seed.code == kSuccess);
  CHECK(lines(other_seed.out).size() == lines(a.out).size());
}

TEST_CASE("JSON output is a single versioned object") {
  const auto r = call({"energy-min", "--n", "3", "--u", "0.5", "--format", "json"});
  REQUIRE(r.code == kSuccess);
  const json j = json::parse(r.out);
  CHECK(j.is_object());
  CHECK(j["schema_version"] == 1);
  CHECK(j["subcommand"] == "energy-min");
  CHECK_THAT(j["energy"].get<double>(), WithinRel(j["ed_reference"]["energy"].get<double>(), 1e-6));
  for (const char* sub : {"vrep-map", "bec-force", "bogoliubov"}) {
    const auto s = call({sub, "--format", "json"});
    REQUIRE(s.code == kSuccess);
    CHECK(json::parse(s.out)["schema_version"] == 1);
  }
}

TEST_CASE("flags override the config file, which overrides defaults") {
  const auto path = temp_file("config.ini");
  {
    std::ofstream f(path);
    f << "n = 3\nu = 0.25\nformat = json\n";
  }
  const auto from_file = call({"energy-min", "--config", path.string()});
  REQUIRE(from_file.code == kSuccess);
  const json a = json::parse(from_file.out);
  CHECK(a["params"]["n"] == 3);
  CHECK(a["params"]["u"] == 0.25);
  CHECK(a["params"]["t"] == 1.0);

  const auto overridden = call({"energy-min", "--config", path.string(), "--n", "2"});
  REQUIRE(overridden.code == kSuccess);
  const json b = json::parse(overridden.out);
  CHECK(b["params"]["n"] == 2);
  CHECK(b["params"]["u"] == 0.25);
  std::filesystem::remove(path);
}

TEST_CASE("output file") {
  const auto path = temp_file("out.csv");
  REQUIRE(call({"vrep-map", "--grid", "3x3", "--out", path.string()}).code == kSuccess);
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == call({"vrep-map", "--grid", "3x3"}).out);
  std::filesystem::remove(path);
  CHECK(call({"vrep-map", "--out", "/nonexistent-dir/x.csv"}).code != kSuccess);
}

TEST_CASE("vrep map shows every exclusion ellipse") {
  const auto r = call({"vrep-map", "--n", "4", "--grid", "40x40"});
  REQUIRE(r.code == kSuccess);
  std::set<std::string> levels;
  int interior = 0;
  for (const auto& row : lines(r.out)) {
    const auto f = fields(row);
    if (f[5] == "NON_VREP_ELLIPSE_INTERIOR") {
      ++interior;
      levels.insert(f[6]);
    }
  }
  CHECK(levels == std::set<std::string>{"0", "1", "2", "3"});
  CHECK(interior > 0);
}

TEST_CASE("bec-force sweep") {
  const auto r = call({"bec-force", "--n", "2"});
  REQUIRE(r.code == kSuccess);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 9);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    const double d = std::stod(f[0]), analytic = std::stod(f[3]), fd = std::stod(f[4]);
    CHECK(d >= 1e-6 * (1 - 1e-12));
    CHECK(d <= 1e-4 * (1 + 1e-12));
    CHECK_THAT(fd, WithinRel(analytic, 0.02));
  }
  CHECK(call({"bec-force", "--n", "2", "--phi", "0"}).code == kSuccess);
}

TEST_CASE("energy-min for six bosons") {
  const auto r = call({"energy-min", "--n", "6", "--u", "0.1", "--format", "json"});
  REQUIRE(r.code == kSuccess);
  const json j = json::parse(r.out);
  CHECK(std::abs(j["discrepancies"]["energy"].get<double>()) < 1e-6 * std::abs(j["energy"].get<double>()));
  CHECK(j["discrepancies"]["rdm_frobenius"].get<double>() < 1e-3);
  CHECK(j["boundary_pinned"] == false);
  CHECK(j["warnings"].empty());
  CHECK(j["d0"].get<double>() > 0);
}

TEST_CASE("bogoliubov tables") {
  const auto modes = call({"bogoliubov", "--np-min", "0.5", "--np-max", "2"});
  REQUIRE(modes.code == kSuccess);
  const auto rows = lines(modes.out);
  CHECK(rows[0] == "np,eps,f_mode,e_mode,lf_gap");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(fields(rows[i])[4]) <= 1e-10);
  const auto force = call({"bogoliubov", "--sweep", "force", "--n", "100"});
  REQUIRE(force.code == kSuccess);
  CHECK(lines(force.out)[0] == "d,force,force_leading,force_fd");
}
