#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ucover/cli.hpp"

using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = ucover::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("ucover_test_" + name);
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("bounds at the published point") {
  const Run r = run({"bounds", "--c", "1", "--kind", "lower", "--theta", "8.6"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(std::fabs(j["value"].get<double>() - 0.2177444298485995) < 1e-12);
  CHECK(j["valid"] == true);
}

TEST_CASE("bounds validity and grid") {
  const json j = json::parse(run({"bounds", "--c", "0.6", "--kind", "upper-matrix"}).out);
  CHECK(j["valid"] == false);
  const Run grid = run({"bounds", "--c-grid", "0.05:1.5:0.05"});
  REQUIRE(grid.code == 0);
  CHECK(std::count(grid.out.begin(), grid.out.end(), '\n') == 31);
  CHECK(grid.out.find("\n1.5,") != std::string::npos);
}

TEST_CASE("conditions verdicts") {
  CHECK(json::parse(run({"conditions", "--family", "logn:c=3"}).out)["covers_T"] == "yes");
  CHECK(json::parse(run({"conditions", "--family", "loglog:c=2"}).out)["full_measure"] == "yes");
  const json j = json::parse(run({"conditions", "--family", "pow:c=1,alpha=3"}).out);
  CHECK(j["countable"] == "yes");
  CHECK(j["diagnostics"].size() == 4);
}

TEST_CASE("structured errors") {
  Run r = run({"bounds", "--c", "-1"});
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["error"] == "domain");
  CHECK(r.out.empty());
  r = run({"conditions", "--family", "nope:c=1"});
  CHECK(json::parse(r.err)["error"] == "unsupported-family");
  r = run({"bounds", "--c", "x"});
  CHECK(r.code == 2);
  r = run({"frobnicate"});
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["error"] == "usage");
  r = run({"riesz", "--c", "0.3"});
  CHECK(json::parse(r.err)["error"] == "invalid-configuration");
}

TEST_CASE("config precedence and dump") {
  const auto dir = temp_dir("cfg");
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "cfg.json");
    f << R"({"c": 0.3, "theta": 3, "kind": "upper-weak"})";
  }
  const std::string cfg = (dir / "cfg.json").string();
  json j = json::parse(run({"bounds", "--config", cfg, "--dump-config"}).out);
  CHECK(j["c"] == 0.3);
  CHECK(j["kind"] == "upper-weak");
  CHECK(j["seed"] == 0x5EEDC0DE);
  j = json::parse(run({"bounds", "--config", cfg, "--c", "0.25", "--theta", "2", "--dump-config"}).out);
  CHECK(j["c"] == 0.25);
  j = json::parse(run({"bounds", "--config", cfg, "--c", "0.25", "--theta", "2"}).out);
  CHECK(j["value"].get<double>() == doctest::Approx(0.8073549220576041));
  {
    std::ofstream f(dir / "bad.json");
    f << R"({"nonsense": 1})";
  }
  CHECK(run({"bounds", "--config", (dir / "bad.json").string()}).code == 2);
}

TEST_CASE("out-dir artifacts and meta") {
  const auto dir = temp_dir("out");
  const Run r = run({"cover-growth", "--levels", "4", "--trials", "20", "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  CHECK(std::filesystem::exists(dir / "trace.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  const json meta = json::parse(slurp(dir / "meta.json"));
  CHECK(meta["command"] == "cover-growth");
  CHECK(meta["config"]["levels"] == 4);
  CHECK(meta["version"] == UCOVER_VERSION);
  CHECK_FALSE(meta.contains("timestamp"));
  REQUIRE(run({"cover-growth", "--levels", "4", "--trials", "20", "--out-dir", dir.string(), "--timestamp"}).code == 0);
  CHECK(json::parse(slurp(dir / "meta.json")).contains("timestamp"));
}

TEST_CASE("simulate subcommands are byte-deterministic across thread counts") {
  const std::vector<std::string> base = {"simulate", "coverage", "--family", "logn:c=1", "--n", "512", "--trials", "64"};
  auto a = base, b = base;
  a.insert(a.end(), {"--threads", "1"});
  b.insert(b.end(), {"--threads", "3"});
  const Run ra = run(a), rb = run(b);
  REQUIRE(ra.code == 0);
  CHECK(ra.out == rb.out);
  CHECK(ra.out.rfind("n,trials,not_covered,frequency,wilson_lo,wilson_hi,shepp_lower,shepp_upper,shepp_lower_2r,shepp_upper_2r\n", 0) == 0);
  const Run seeded = run({"simulate", "coverage", "--family", "logn:c=3", "--n", "1000", "--trials", "200", "--seed", "7"});
  REQUIRE(seeded.code == 0);
  CHECK(seeded.out.find("\n1000,200,0,0,") != std::string::npos);
}

TEST_CASE("remaining subcommands run") {
  CHECK(run({"simulate", "measure", "--family", "pow:c=0.5,alpha=1", "--n", "256", "--trials", "5"}).code == 0);
  CHECK(run({"simulate", "countable", "--n", "200", "--trials", "5"}).code == 0);
  const Run rz = run({"riesz", "--trials", "10", "--format", "csv"});
  CHECK(rz.out.rfind("trial,energy\n", 0) == 0);
  const Run fr = run({"frostman", "--probes", "5"});
  REQUIRE(fr.code == 0);
  CHECK(json::parse(fr.out)["violations"] == 0);
  CHECK(run({"--help"}).code == 0);
}
