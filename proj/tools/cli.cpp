#include "permugibbs/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "permugibbs/csv.hpp"
#include "permugibbs/rng.hpp"

namespace permugibbs {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path, "expected an object");
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!ok.count(k)) fail(path.empty() ? k : path + "." + k, "unknown key");
  }
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

PointSetSpec parse_point_set(const json& j, Window& window) {
  allow_keys(j, "point_set", {"kind", "spacing", "rate", "seed", "points", "window"});
  PointSetSpec s;
  const std::string kind = j.contains("kind") ? str(j["kind"], "point_set.kind") : "integer_lattice";
  if (kind == "integer_lattice") {
    s.kind = PointSetKind::IntegerLattice;
  } else if (kind == "scaled_lattice") {
    s.kind = PointSetKind::ScaledLattice;
    if (!j.contains("spacing")) fail("point_set.spacing", "required for scaled_lattice");
    s.spacing = num(j["spacing"], "point_set.spacing");
    if (!(s.spacing > 0.0)) fail("point_set.spacing", "must be positive");
  } else if (kind == "poisson") {
    s.kind = PointSetKind::Poisson;
    if (j.contains("rate")) s.rate = num(j["rate"], "point_set.rate");
    if (!(s.rate > 0.0)) fail("point_set.rate", "must be positive");
    if (j.contains("seed")) {
      const auto seed = integer(j["seed"], "point_set.seed");
      if (seed < 0) fail("point_set.seed", "must be >= 0");
      s.seed = static_cast<std::uint64_t>(seed);
    }
  } else if (kind == "explicit") {
    s.kind = PointSetKind::Explicit;
    if (!j.contains("points") || !j["points"].is_array()) fail("point_set.points", "expected an array");
    for (const auto& x : j["points"]) s.listed.push_back(num(x, "point_set.points[]"));
    if (s.listed.size() < 2) fail("point_set.points", "needs at least two points");
    for (std::size_t i = 1; i < s.listed.size(); ++i) {
      if (!(s.listed[i] > s.listed[i - 1])) fail("point_set.points", "must be strictly increasing");
    }
  } else {
    fail("point_set.kind", "unknown kind '" + kind + "'");
  }
  if (j.contains("window")) {
    const auto& w = j["window"];
    if (!w.is_array() || w.size() != 2) fail("point_set.window", "expected [lo, hi]");
    window = {num(w[0], "point_set.window[0]"), num(w[1], "point_set.window[1]")};
    if (!(window.hi > window.lo)) fail("point_set.window", "needs lo < hi");
  }
  return s;
}

Potential parse_potential(const json& j, const std::string& path) {
  allow_keys(j, path, {"kind", "alpha", "p"});
  const std::string kind = j.contains("kind") ? str(j["kind"], path + ".kind") : "power";
  if (kind == "zero") return Potential::zero();
  if (kind != "power") fail(path + ".kind", "unknown kind '" + kind + "'");
  const double alpha = j.contains("alpha") ? num(j["alpha"], path + ".alpha") : 1.0;
  const double p = j.contains("p") ? num(j["p"], path + ".p") : 2.0;
  if (!(alpha > 0.0)) fail(path + ".alpha", "must be positive");
  if (!(p > 1.0)) fail(path + ".p", "must exceed 1");
  return Potential::power(alpha, p);
}

BoundaryCondition parse_boundary(const json& j, const std::string& path) {
  allow_keys(j, path, {"kind", "n", "overrides"});
  const std::string kind = j.contains("kind") ? str(j["kind"], path + ".kind") : "shift";
  const Index n = j.contains("n") ? integer(j["n"], path + ".n") : 0;
  if (kind == "shift") return BoundaryCondition::shift(n);
  if (kind == "reflection") return BoundaryCondition::reflection();
  if (kind == "dyadic") return BoundaryCondition::dyadic();
  if (kind == "finite_modification") {
    std::vector<std::pair<Index, Index>> ov;
    if (!j.contains("overrides") || !j["overrides"].is_array()) {
      fail(path + ".overrides", "expected an array of [source, image] pairs");
    }
    for (const auto& e : j["overrides"]) {
      if (!e.is_array() || e.size() != 2) fail(path + ".overrides[]", "expected [source, image]");
      ov.emplace_back(integer(e[0], path + ".overrides[]"), integer(e[1], path + ".overrides[]"));
    }
    try {
      return BoundaryCondition::finite_modification(n, ov);
    } catch (const std::invalid_argument& e) {
      fail(path + ".overrides", e.what());
    }
  }
  fail(path + ".kind", "unknown kind '" + kind + "'");
}

Volume parse_volume(const json& j, const std::string& path) {
  if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
    const Index lo = j[0].get<Index>();
    const Index hi = j[1].get<Index>();
    if (hi < lo) fail(path, "needs lo <= hi");
    return Volume::range(lo, hi);
  }
  if (j.is_object()) {
    allow_keys(j, path, {"points"});
    if (!j.contains("points") || !j["points"].is_array() || j["points"].empty()) {
      fail(path + ".points", "expected a non-empty array of indices");
    }
    std::vector<Index> pts;
    for (const auto& x : j["points"]) pts.push_back(integer(x, path + ".points[]"));
    return Volume(pts);
  }
  fail(path, "expected [lo, hi] or {\"points\": [...]}");
}

void parse_sampler(const json& j, ExperimentConfig& c) {
  allow_keys(j, "sampler", {"steps", "burn_in", "thinning", "chains", "batches", "bootstrap"});
  auto& s = c.sampler;
  if (j.contains("steps")) s.steps = integer(j["steps"], "sampler.steps");
  if (j.contains("burn_in")) s.burn_in = integer(j["burn_in"], "sampler.burn_in");
  if (j.contains("thinning")) s.thinning = integer(j["thinning"], "sampler.thinning");
  if (j.contains("chains")) s.chains = static_cast<int>(integer(j["chains"], "sampler.chains"));
  if (j.contains("batches")) s.batches = static_cast<int>(integer(j["batches"], "sampler.batches"));
  if (j.contains("bootstrap")) c.bootstrap = static_cast<int>(integer(j["bootstrap"], "sampler.bootstrap"));
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    fail("sampler", e.what());
  }
  if (c.bootstrap < 0) fail("sampler.bootstrap", "must be >= 0");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  allow_keys(j, "", {"seed", "output_dir", "point_set", "potential", "boundary", "boundary_alt",
                     "volumes", "window", "sampler", "enumeration", "checks", "check_params"});
  ExperimentConfig c;
  c.sampler.steps = 100'000;
  c.sampler.burn_in = 10'000;
  c.sampler.thinning = 10;
  c.sampler.chains = 2;
  c.sampler.batches = 20;
  if (j.contains("seed")) {
    const auto s = integer(j["seed"], "seed");
    if (s < 0) fail("seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("output_dir")) c.output_dir = str(j["output_dir"], "output_dir");
  if (j.contains("point_set")) c.point_set = parse_point_set(j["point_set"], c.point_window);
  if (j.contains("potential")) c.potential = parse_potential(j["potential"], "potential");
  if (j.contains("boundary")) c.boundary = parse_boundary(j["boundary"], "boundary");
  if (j.contains("boundary_alt")) c.boundary_alt = parse_boundary(j["boundary_alt"], "boundary_alt");
  if (j.contains("volumes")) {
    if (!j["volumes"].is_array() || j["volumes"].empty()) fail("volumes", "expected a non-empty array");
    c.volumes.clear();
    for (std::size_t i = 0; i < j["volumes"].size(); ++i) {
      c.volumes.push_back(parse_volume(j["volumes"][i], "volumes[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("window")) {
    if (!j["window"].is_array() || j["window"].empty()) fail("window", "expected a non-empty array");
    for (const auto& x : j["window"]) c.window.push_back(integer(x, "window[]"));
  }
  if (j.contains("sampler")) {
    parse_sampler(j["sampler"], c);
  }
  if (j.contains("enumeration")) {
    allow_keys(j["enumeration"], "enumeration", {"cap"});
    if (j["enumeration"].contains("cap")) {
      const auto cap = integer(j["enumeration"]["cap"], "enumeration.cap");
      if (cap < 1 || cap > static_cast<std::int64_t>(kHardEnumerationCap)) {
        fail("enumeration.cap", "must be in [1, " + std::to_string(kHardEnumerationCap) + "]");
      }
      c.enumeration.cap = static_cast<std::size_t>(cap);
    }
  }
  if (j.contains("checks")) {
    const auto& ch = j["checks"];
    if (ch.is_string() && ch.get<std::string>() == "all") {
      c.checks = check_ids();
    } else if (ch.is_array()) {
      for (const auto& id : ch) {
        const std::string s = str(id, "checks[]");
        if (!is_check_id(s)) fail("checks", "unknown check id '" + s + "'");
        c.checks.push_back(s);
      }
    } else {
      fail("checks", "expected \"all\" or an array of check ids");
    }
  }
  if (j.contains("check_params")) {
    const auto& cp = j["check_params"];
    allow_keys(cp, "check_params", {"potential", "steps", "chains"});
    if (cp.contains("potential")) {
      c.check_params.potential = parse_potential(cp["potential"], "check_params.potential");
    }
    if (cp.contains("steps")) c.check_params.steps = integer(cp["steps"], "check_params.steps");
    if (cp.contains("chains")) {
      c.check_params.chains = static_cast<int>(integer(cp["chains"], "check_params.chains"));
    }
    if (c.check_params.steps < 0 || c.check_params.chains < 0) fail("check_params", "must be >= 0");
  }
  c.check_params.cap = c.enumeration.cap;
  c.canonical = j.dump();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

struct Output {
  std::string name;
  std::string content;
};

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Existing manifest rows for other files are kept, so successive subcommands
// sharing an output directory accumulate into one manifest.
std::map<std::string, std::vector<std::string>> read_manifest(const std::filesystem::path& path) {
  std::map<std::string, std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line)) return rows;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() == 4) rows[f[0]] = f;
  }
  return rows;
}

void write_outputs(const std::string& dir, const std::vector<Output>& files, std::uint64_t seed,
                   const ExperimentConfig& cfg) {
  std::filesystem::create_directories(dir);
  const auto manifest_path = std::filesystem::path(dir) / "manifest.csv";
  auto rows = read_manifest(manifest_path);
  const std::string config_hash = hex(fnv1a(cfg.canonical));
  for (const auto& f : files) {
    std::ofstream out(std::filesystem::path(dir) / f.name, std::ios::binary);
    out << f.content;
    if (!out) throw std::runtime_error("failed to write " + f.name);
    rows[f.name] = {f.name, std::to_string(seed), config_hash, hex(fnv1a(f.content))};
  }
  CsvTable manifest({"file", "seed", "config_hash", "content_hash"});
  for (const auto& [name, r] : rows) manifest.row(r);
  std::ofstream out(manifest_path, std::ios::binary);
  out << manifest.str();
  if (!out) throw std::runtime_error("failed to write manifest.csv");
}

std::vector<Index> default_window(const ExperimentConfig& c) {
  if (!c.window.empty()) return c.window;
  const auto& pts = c.volumes.front().points();
  return {pts[(pts.size() - 1) / 2]};
}

int cmd_points(const ExperimentConfig& c, std::uint64_t, std::vector<Output>& out,
               std::ostream& log) {
  const PointSet ps = generate(c.point_set, c.point_window);
  out.push_back({"points.csv", points_csv(ps.materialized())});
  log << "points: " << ps.materialized().size() << " in [" << format_double(c.point_window.lo)
      << ", " << format_double(c.point_window.hi) << "]\n";
  return 0;
}

int cmd_enumerate(const ExperimentConfig& c, std::uint64_t, std::vector<Output>& out,
                  std::ostream& log) {
  const PointSet ps = PointSet::from_spec(c.point_set);
  const auto table = enumerate_compatible(ps, c.boundary, c.volumes.front(), c.potential, c.enumeration);
  out.push_back({"table.csv", table_csv(table)});
  log << "enumerate: " << table.size() << " states, |D| = " << table.domain().size()
      << ", log Z = " << format_double(table.log_partition()) << "\n";
  return 0;
}

int cmd_sample(const ExperimentConfig& c, std::uint64_t seed, std::vector<Output>& out,
               std::ostream& log) {
  const PointSet ps = PointSet::from_spec(c.point_set);
  const auto& vol = c.volumes.front();
  const auto window = c.window.empty() ? vol.points() : c.window;
  std::vector<Observable> obs;
  for (Index x : window) obs.push_back(state_observable({x}, "sigma(" + std::to_string(x) + ")"));
  obs.push_back(window_observable(window));
  ChainConfig cfg = c.sampler;
  cfg.seed = seed;
  const auto dist = mcmc_run(ps, c.boundary, vol, c.potential, cfg, obs);
  out.push_back({"empirical.csv", empirical_csv(dist)});
  std::optional<WindowPermutation> last;
  mcmc_visit(ps, c.boundary, vol, c.potential, cfg, 0,
             [&](const WindowPermutation& s, std::int64_t) { last = s; });
  out.push_back({"final_state.csv", permutation_csv(*last)});
  log << "sample: " << dist.samples() << " samples over " << cfg.chains << " chains\n";
  return 0;
}

int cmd_verify(const ExperimentConfig& c, std::uint64_t seed, std::vector<Output>& out,
               std::ostream& log) {
  const auto& ids = c.checks.empty() ? check_ids() : c.checks;
  CheckParams p = c.check_params;
  p.seed = seed;
  std::vector<CheckReport> reports;
  bool ok = true;
  for (const auto& id : ids) {
    reports.push_back(named_check(id, p));
    const auto& r = reports.back();
    ok = ok && r.passed();
    log << (r.passed() ? "PASS " : "FAIL ") << r.id << "  rows=" << r.rows.size()
        << " violations=" << r.violations() << " worst_margin=" << format_double(r.worst_margin())
        << " runtime=" << format_double(r.runtime_seconds) << "s\n";
  }
  out.push_back({"report.csv", report_csv(reports)});
  return ok ? 0 : 1;
}

std::string marginals_csv(const ScanResult& s) {
  CsvTable t({"boundary", "volume", "value", "freq"});
  auto dump = [&](const std::vector<Distribution>& ms, const char* tag) {
    for (std::size_t i = 0; i < ms.size(); ++i) {
      for (const auto& [k, f] : ms[i]) {
        t.row({tag, s.volumes[i].describe(), format_key(k), format_double(f)});
      }
    }
  };
  dump(s.marginals, "eta");
  dump(s.other_marginals, "eta_alt");
  return t.str();
}

int cmd_scan(const ExperimentConfig& c, std::uint64_t seed, std::vector<Output>& out,
             std::ostream& log) {
  const PointSet ps = PointSet::from_spec(c.point_set);
  ScanOptions opts;
  opts.chain = c.sampler;
  opts.chain.seed = seed;
  opts.bootstrap = c.bootstrap;
  const auto window = default_window(c);
  const bool coupling = c.boundary_alt.has_value();
  const ScanResult s =
      coupling ? coupling_scan(ps, c.boundary, *c.boundary_alt, c.volumes, window, c.potential, opts)
               : volume_scan(ps, c.boundary, c.volumes, window, c.potential, opts);
  out.push_back({"scan.csv", scan_csv(s, coupling)});
  out.push_back({"marginals.csv", marginals_csv(s)});
  for (std::size_t i = 0; i < s.tv.size(); ++i) {
    log << (coupling ? "coupling tv " : "successive tv ") << i << ": " << format_double(s.tv[i])
        << " +- " << format_double(s.tv_stderr[i]) << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial random permutations: enumeration, sampling and checks", "permugibbs"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  using Cmd = int (*)(const ExperimentConfig&, std::uint64_t, std::vector<Output>&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Cmd>> commands = {
      {"points", "Generate the point set inside its window", cmd_points},
      {"enumerate", "Exact specification table on the first volume", cmd_enumerate},
      {"sample", "Metropolis swap chain on the first volume", cmd_sample},
      {"verify", "Run named checks", cmd_verify},
      {"scan", "Volume or coupling scan over nested volumes", cmd_scan},
  };
  for (const auto& [name, help, fn] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  Cmd fn = nullptr;
  for (const auto& [n, h, f] : commands) {
    if (n == name) fn = f;
  }
  try {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.output_dir = *out_dir;
    if (name == "scan") validate_nested(cfg.volumes, default_window(cfg));
    const std::uint64_t job_seed = derive_seed(cfg.seed, name);
    std::vector<Output> files;
    const int code = fn(cfg, job_seed, files, out);
    write_outputs(cfg.output_dir, files, cfg.seed, cfg);
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace permugibbs
