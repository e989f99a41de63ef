#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "permugibbs/cli.hpp"

using namespace permugibbs;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "permugibbs");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("permugibbs_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const std::string& json) {
  const auto p = dir / "config.json";
  std::ofstream(p) << json;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSmall = R"({
  "seed": 3,
  "point_set": {"kind": "integer_lattice", "window": [-6, 6]},
  "potential": {"kind": "power", "alpha": 1.0, "p": 2.0},
  "boundary": {"kind": "shift", "n": 1},
  "volumes": [[0, 3], [-1, 4]],
  "window": [1],
  "sampler": {"steps": 20000, "burn_in": 1000, "thinning": 10, "chains": 2, "batches": 5, "bootstrap": 20}
})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parsing") {
    const auto c = parse_config(kSmall);
    CHECK(c.seed == 3);
    CHECK(c.boundary.flow().value == 1);
    CHECK(c.volumes.size() == 2);
    CHECK(c.sampler.chains == 2);
    CHECK(c.bootstrap == 20);
    CHECK_THROWS_AS(parse_config(R"({"sed": 3})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"sampler": {"step": 3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"checks": ["bogus"]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"potential": {"kind": "power", "alpha": -1}})"), ConfigError);
  }

  TEST_CASE("verify passes for the uniform check") {
    const auto dir = scratch("verify");
    const auto cfg = write_config(dir, R"({"checks": ["v0-uniform"]})");
    const auto r = run({"verify", "--config", cfg, "--out", (dir / "out").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS v0-uniform") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "report.csv"));
    CHECK(fs::exists(dir / "out" / "manifest.csv"));
  }

  TEST_CASE("unknown check id exits 2 without outputs") {
    const auto dir = scratch("badcheck");
    const auto cfg = write_config(dir, R"({"checks": ["nope"]})");
    const auto r = run({"verify", "--config", cfg, "--out", (dir / "out").string()});
    CHECK(r.code == 2);
    CHECK_FALSE(fs::exists(dir / "out"));
  }

  TEST_CASE("argument errors exit 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"sample"}).code == 2);
    CHECK(run({"frobnicate", "--config", "x.json"}).code == 2);
    CHECK(run({"sample", "--config", "/nonexistent/config.json"}).code == 2);
  }

  TEST_CASE("enumeration cap exits 2") {
    const auto dir = scratch("cap");
    const auto cfg = write_config(dir, R"({"volumes": [[0, 9]], "enumeration": {"cap": 9}})");
    const auto r = run({"enumerate", "--config", cfg, "--out", (dir / "out").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("enumeration cap exceeded") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "out" / "table.csv"));
  }

  TEST_CASE("outputs and manifests are reproducible") {
    const auto dir = scratch("repro");
    const auto cfg = write_config(dir, kSmall);
    for (const char* sub : {"a", "b"}) {
      const auto out = (dir / sub).string();
      for (const char* cmd : {"points", "enumerate", "sample", "scan"}) {
        CHECK(run({cmd, "--config", cfg, "--out", out}).code == 0);
      }
    }
    for (const char* f : {"points.csv", "table.csv", "empirical.csv", "final_state.csv", "scan.csv",
                          "marginals.csv", "manifest.csv"}) {
      CHECK_MESSAGE(slurp(dir / "a" / f) == slurp(dir / "b" / f), f);
      CHECK_FALSE(slurp(dir / "a" / f).empty());
    }
    const auto manifest = slurp(dir / "a" / "manifest.csv");
    CHECK(manifest.rfind("file,seed,config_hash,content_hash", 0) == 0);
    for (const char* f : {"points.csv", "table.csv", "scan.csv"}) {
      CHECK(manifest.find(f) != std::string::npos);
    }
  }

  TEST_CASE("seed flag drives sampling") {
    const auto dir = scratch("seed");
    const auto cfg = write_config(dir, kSmall);
    CHECK(run({"sample", "--config", cfg, "--seed", "7", "--out", (dir / "a").string()}).code == 0);
    CHECK(run({"sample", "--config", cfg, "--seed", "7", "--out", (dir / "b").string()}).code == 0);
    CHECK(run({"sample", "--config", cfg, "--seed", "8", "--out", (dir / "c").string()}).code == 0);
    CHECK(slurp(dir / "a" / "empirical.csv") == slurp(dir / "b" / "empirical.csv"));
    CHECK(slurp(dir / "a" / "empirical.csv") != slurp(dir / "c" / "empirical.csv"));
  }

  TEST_CASE("coupling scan rejects different flows") {
    const auto dir = scratch("coupling");
    const auto cfg = write_config(dir, R"({
      "boundary": {"kind": "shift", "n": 0},
      "boundary_alt": {"kind": "shift", "n": 1},
      "volumes": [[-2, 2]],
      "window": [0]
    })");
    const auto r = run({"scan", "--config", cfg, "--out", (dir / "out").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("flows") != std::string::npos);
  }

  TEST_CASE("shipped configs parse") {
    for (const char* name : {"acceptance.json", "coupling.json", "small.json"}) {
      CHECK_NOTHROW(load_config(std::string(PERMUGIBBS_SOURCE_DIR) + "/configs/" + name));
    }
  }
}
