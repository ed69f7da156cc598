#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pilotforge/cli.hpp"

namespace fs = std::filesystem;
using namespace pilotforge::cli;

namespace {

const std::string kScenario = std::string(PILOTFORGE_DATA_DIR) + "/table1.scenario";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pilotforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pilotforge_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("design writes pilots, alpha and power") {
  const fs::path dir = scratch("design");
  const Result r = invoke({"design", "--scenario", kScenario, "--scheme", "gwbe", "--out", dir});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(dir / "pilots.csv"));
  CHECK(fs::exists(dir / "alpha.csv"));
  CHECK(fs::exists(dir / "power.csv"));
  CHECK(fs::exists(dir / "run.manifest"));
  const auto pilots = lines(slurp(dir / "pilots.csv"));
  CHECK(pilots.size() == 9);
  CHECK(pilots[0] == "cell,user,component_1,component_2,component_3");
}

TEST_CASE("design for all schemes writes one pilot file per scheme") {
  const fs::path dir = scratch("design_all");
  REQUIRE(invoke({"design", "--scenario", kScenario, "--out", dir}).code == kExitOk);
  for (const char* s : {"gwbe", "wbe", "fos"}) {
    CHECK(fs::exists(dir / ("pilots_" + std::string(s) + ".csv")));
  }
  CHECK(lines(slurp(dir / "alpha.csv")).size() == 1 + 3 * 8);
}

TEST_CASE("sinr and min-antennas outputs") {
  const fs::path dir = scratch("sinr");
  REQUIRE(invoke({"sinr", "--scenario", kScenario, "--antennas", "50,400", "--out", dir}).code ==
          kExitOk);
  CHECK(lines(slurp(dir / "sinr.csv")).size() == 1 + 3 * 2 * 8);
  const Result m = invoke({"min-antennas", "--scenario", kScenario, "--mu", "0.9", "--out", dir});
  CHECK(m.code == kExitOk);
  CHECK(lines(slurp(dir / "minant.csv")).size() == 1 + 3 * 8);
  CHECK(m.out.find("gwbe: ") != std::string::npos);
}

TEST_CASE("capacity reports the bound and region checks") {
  const fs::path dir = scratch("capacity");
  const Result r = invoke({"capacity", "--scenario", kScenario, "--out", dir});
  CHECK(r.code == kExitOk);
  const auto cap = lines(slurp(dir / "user_capacity.csv"));
  REQUIRE(cap.size() == 2);
  CHECK(cap[1].rfind("3,8,", 0) == 0);
  CHECK(lines(slurp(dir / "capacity.csv")).size() == 1 + 3 * 2);
}

TEST_CASE("montecarlo writes the seed column") {
  const fs::path dir = scratch("mc");
  const Result r = invoke({"montecarlo", "--scenario", kScenario, "--scheme", "fos", "--antennas",
                           "20", "--realizations", "30", "--seed", "77", "--out", dir});
  CHECK(r.code == kExitOk);
  const auto rows = lines(slurp(dir / "mc.csv"));
  REQUIRE(rows.size() == 9);
  CHECK(rows[1].rfind("fos,20,30,77,", 0) == 0);
}

TEST_CASE("max-sinr sweep over K") {
  const fs::path dir = scratch("maxsinr");
  const Result r = invoke({"max-sinr", "--family", "fig3", "--K", "4..14", "--out", dir});
  CHECK(r.code == kExitOk);
  const auto rows = lines(slurp(dir / "maxsinr.csv"));
  CHECK(rows.size() == 1 + 11 * 3);
  CHECK(rows[0] == "family,parameter,scheme,gamma_max,cap_limited");
}

TEST_CASE("boundary and region-volume") {
  const fs::path dir = scratch("region");
  CHECK(invoke({"boundary", "--grid", "5", "--out", dir}).code == kExitOk);
  CHECK(lines(slurp(dir / "boundary.csv")).size() == 1 + 3 * 25);
  const Result v = invoke({"region-volume", "--samples", "100000", "--out", dir});
  CHECK(v.code == kExitOk);
  CHECK(lines(slurp(dir / "region.csv")).size() == 4);
  CHECK(v.out.find("containment violations: wbe 0, fos 0") != std::string::npos);
}

TEST_CASE("repro figure 6 writes network minima") {
  const fs::path dir = scratch("fig6");
  const Result r =
      invoke({"repro", "--figure", "6", "--scenario", kScenario, "--mu", "0.9", "--out", dir});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(dir / "minant.csv"));
  CHECK(lines(slurp(dir / "minant_sweep.csv")).size() == 1 + 3 * 46);
}

TEST_CASE("infeasible targets exit 2 with the violated bound") {
  const fs::path dir = scratch("infeasible");
  fs::create_directories(dir);
  const fs::path sc = dir / "bad.scenario";
  std::ofstream(sc) << R"({"cells": 2, "users_per_cell": 4, "pilot_length": 3, "scheme": "gwbe",
 "targets": [[0.99, 0.99, 0.99, 0.9], [0.5, 0.4, 0.3, 0.2]]})";
  const Result r = invoke({"design", "--scenario", sc.string(), "--out", dir});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("per-cell effective bandwidth") != std::string::npos);
  CHECK(r.err.find("tau/L = 1.5") != std::string::npos);
}

TEST_CASE("validation failures exit 2") {
  const fs::path dir = scratch("validation");
  CHECK(invoke({"design", "--scenario", kScenario, "--mu", "1.5", "--out", dir}).code ==
        kExitValidation);
  CHECK(invoke({"design", "--scenario", (dir / "missing").string(), "--out", dir}).code ==
        kExitValidation);
  CHECK(invoke({"repro", "--figure", "7", "--out", dir}).code == kExitValidation);
}

TEST_CASE("usage errors exit 64") {
  CHECK(invoke({"design", "--scenario", kScenario, "--bogus"}).code == kExitUsage);
  CHECK(invoke({}).code == kExitUsage);
  CHECK(invoke({"design"}).code == kExitUsage);
  CHECK(invoke({"design", "--scenario", kScenario, "--scheme", "zf"}).code == kExitUsage);
}

TEST_CASE("rerunning a command is byte identical") {
  setenv("SOURCE_DATE_EPOCH", "1500000000", 1);
  const fs::path dir = scratch("idempotent");
  const std::vector<std::string> args{"sinr", "--scenario", kScenario, "--out", dir.string()};
  REQUIRE(invoke(args).code == kExitOk);
  const std::string sinr = slurp(dir / "sinr.csv");
  const std::string manifest = slurp(dir / "run.manifest");
  REQUIRE(invoke(args).code == kExitOk);
  CHECK(slurp(dir / "sinr.csv") == sinr);
  CHECK(slurp(dir / "run.manifest") == manifest);
  CHECK(manifest.find("2017-07-14T02:40:00Z") != std::string::npos);
  unsetenv("SOURCE_DATE_EPOCH");
}
